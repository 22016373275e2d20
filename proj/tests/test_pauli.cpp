#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mcvqe/pauli.hpp"
#include "mcvqe/statevector.hpp"
#include "oracles.hpp"

using namespace mcvqe;
using namespace mcvqe::testing;

namespace {

PauliWord random_word(int n_qubits, std::mt19937_64& rng) {
  PauliWord w(n_qubits);
  std::uniform_int_distribution<int> letter(0, 3);
  const char letters[4] = {'I', 'X', 'Y', 'Z'};
  for (int q = 0; q < n_qubits; ++q) w.set_letter(q, letters[letter(rng)]);
  return w;
}

PauliOperator random_operator(int n_qubits, int n_terms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  PauliOperator op(n_qubits);
  for (int t = 0; t < n_terms; ++t) {
    op.add_term(random_word(n_qubits, rng), coeff(rng));
  }
  return op;
}

}  // namespace

TEST_CASE("single-qubit multiplication table") {
  const auto x = PauliWord::single(1, 0, 'X');
  const auto y = PauliWord::single(1, 0, 'Y');
  const auto z = PauliWord::single(1, 0, 'Z');

  auto xx = multiply(x, x);
  CHECK(xx.word.is_identity());
  CHECK(xx.phase == std::complex<double>{1.0, 0.0});

  auto xy = multiply(x, y);
  CHECK(xy.word == z);
  CHECK(xy.phase == std::complex<double>{0.0, 1.0});

  auto yx = multiply(y, x);
  CHECK(yx.word == z);
  CHECK(yx.phase == std::complex<double>{0.0, -1.0});
}

TEST_CASE("multiplication matches dense matrices") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_word(3, rng);
    const auto b = random_word(3, rng);
    const auto prod = multiply(a, b);
    const Mat lhs = dense_word(a) * dense_word(b);
    const Mat rhs = prod.phase * dense_word(prod.word);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
  }
  CHECK_THROWS(multiply(PauliWord(2), PauliWord(3)));
}

TEST_CASE("word round trips through text") {
  std::mt19937_64 rng(17);
  PauliOperator op = random_operator(4, 12, rng);
  const auto parsed = PauliOperator::parse(op.to_string(), 4);
  CHECK(parsed.n_terms() == op.n_terms());
  for (const auto& [w, c] : op.terms()) {
    CHECK(parsed.coefficient(w) == c);
  }
}

TEST_CASE("expectation basics") {
  Statevector zero = Statevector::vacuum(2);
  auto op = PauliOperator::identity(2, 0.75);
  CHECK(op.expectation(zero) == doctest::Approx(0.75));

  PauliOperator z0(2);
  z0.add_term(PauliWord::single(2, 0, 'Z'), 1.0);
  CHECK(z0.expectation(zero) == doctest::Approx(1.0));
  const auto flipped = Statevector::basis_state(2, 1);
  CHECK(z0.expectation(flipped) == doctest::Approx(-1.0));
}

TEST_CASE("expectation matches dense quadratic form") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto op = random_operator(3, 15, rng);
    const auto psi = random_state(3, 100 + trial);
    const Vec v = to_eigen(psi);
    const std::complex<double> expect = v.dot(dense_operator(op) * v);
    CHECK(op.expectation(psi) ==
          doctest::Approx(expect.real()).epsilon(1e-12));
  }
}

TEST_CASE("expectation rejects bad input") {
  auto op = PauliOperator::identity(2, 1.0);
  Statevector psi = Statevector::vacuum(3);
  CHECK_THROWS(op.expectation(psi));
  Statevector unnormalized = Statevector::vacuum(2);
  unnormalized[0] = 2.0;
  CHECK_THROWS(op.expectation(unnormalized));
}

TEST_CASE("apply basics") {
  const auto psi = random_state(3, 9);
  const auto id = PauliOperator::identity(3, 1.0);
  const auto out = id.apply(psi);
  for (std::size_t i = 0; i < psi.dim(); ++i) CHECK(out[i] == psi[i]);

  PauliOperator x0(3);
  x0.add_term(PauliWord::single(3, 0, 'X'), 1.0);
  const auto flipped = x0.apply(Statevector::vacuum(3));
  CHECK(flipped[1] == std::complex<double>{1.0, 0.0});
}

TEST_CASE("apply matches dense action and is linear") {
  std::mt19937_64 rng(31);
  const auto op = random_operator(3, 20, rng);
  const Mat dense = dense_operator(op);

  const auto psi1 = random_state(3, 41);
  const auto psi2 = random_state(3, 43);

  const Vec direct = dense * to_eigen(psi1);
  const auto applied = op.apply(psi1);
  CHECK((direct - to_eigen(applied)).cwiseAbs().maxCoeff() < 1e-13);

  // Linearity.
  Statevector combo(3);
  const std::complex<double> a{0.3, -0.2}, b{-1.1, 0.4};
  combo.axpy(a, psi1);
  combo.axpy(b, psi2);
  auto lhs = op.apply(combo);
  Statevector rhs(3);
  rhs.axpy(a, op.apply(psi1));
  rhs.axpy(b, op.apply(psi2));
  lhs -= rhs;
  CHECK(lhs.norm() < 1e-13);
}

TEST_CASE("hermiticity of real-coefficient operators") {
  std::mt19937_64 rng(57);
  const auto op = random_operator(3, 18, rng);
  const auto psi = random_state(3, 71);
  const auto phi = random_state(3, 73);
  const auto lhs = inner(psi, op.apply(phi));
  const auto rhs = inner(op.apply(psi), phi);
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("zero coefficients are dropped on accumulation") {
  PauliOperator op(2);
  const auto w = PauliWord::single(2, 1, 'Y');
  op.add_term(w, 0.5);
  op.add_term(w, -0.5);
  CHECK(op.n_terms() == 0);
}
