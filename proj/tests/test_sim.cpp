#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mcvqe/jw.hpp"
#include "mcvqe/sim.hpp"
#include "oracles.hpp"

using namespace mcvqe;
using namespace mcvqe::testing;

namespace {

FabricParameters random_theta(const FabricLayout& layout, std::uint64_t seed,
                              double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  FabricParameters theta(layout.n_parameters());
  for (auto& t : theta) t = unif(rng);
  return theta;
}

void check_quantum_numbers(const Statevector& psi, int m, double na, double nb,
                           double s2, double tol = 1e-12) {
  const auto ops = map_number_operators(m);
  CHECK(ops.n_alpha.expectation(psi) == doctest::Approx(na).epsilon(tol));
  CHECK(ops.n_beta.expectation(psi) == doctest::Approx(nb).epsilon(tol));
  CHECK(std::abs(ops.s2.expectation(psi) - s2) < tol);
}

}  // namespace

TEST_CASE("closed-shell reference state") {
  const SectorSpec sector{1, 1, 0};
  const auto phi0 = prepare_csf(CsfSpec::closed_shell(), sector, 2);
  // Qubits (0 alpha, 0 beta) occupied: basis index 0b0011.
  CHECK(phi0[3] == std::complex<double>{1.0, 0.0});
  CHECK(phi0.norm() == doctest::Approx(1.0));
  check_quantum_numbers(phi0, 2, 1.0, 1.0, 0.0);
}

TEST_CASE("singlet single excitation CSF") {
  const SectorSpec sector{1, 1, 0};
  const auto s = prepare_csf(CsfSpec::single(0, 1), sector, 2);
  CHECK(s.norm() == doctest::Approx(1.0));
  check_quantum_numbers(s, 2, 1.0, 1.0, 0.0);
  // Two open-shell determinants with equal weight and the same sign pattern
  // as (a+ i + abar+ ibar)|phi0>/sqrt(2).
  const double inv = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(s[0b0110]) == doctest::Approx(inv));
  CHECK(std::abs(s[0b1001]) == doctest::Approx(inv));
}

TEST_CASE("diagonal double excitation CSF") {
  const SectorSpec sector{1, 1, 0};
  const auto d = prepare_csf(CsfSpec::double_exc(0, 1), sector, 2);
  CHECK(d[0b1100] == std::complex<double>{1.0, 0.0});
  check_quantum_numbers(d, 2, 1.0, 1.0, 0.0);
  const auto phi0 = prepare_csf(CsfSpec::closed_shell(), sector, 2);
  CHECK(std::abs(inner(phi0, d)) < 1e-15);
}

TEST_CASE("reference pool is orthonormal and spin pure (M=4)") {
  const SectorSpec sector{2, 2, 0};
  std::vector<Statevector> pool;
  pool.push_back(prepare_csf(CsfSpec::closed_shell(), sector, 4));
  for (int i = 0; i < 2; ++i)
    for (int a = 2; a < 4; ++a) {
      pool.push_back(prepare_csf(CsfSpec::single(i, a), sector, 4));
      pool.push_back(prepare_csf(CsfSpec::double_exc(i, a), sector, 4));
    }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    check_quantum_numbers(pool[i], 4, 2.0, 2.0, 0.0);
    for (std::size_t j = 0; j < i; ++j) {
      CHECK(std::abs(inner(pool[i], pool[j])) < 1e-14);
    }
  }
}

TEST_CASE("CSF errors") {
  CHECK_THROWS(prepare_csf(CsfSpec::closed_shell(), SectorSpec{2, 1, 1}, 2));
  CHECK_THROWS(prepare_csf(CsfSpec::single(1, 0), SectorSpec{1, 1, 0}, 2));
  CHECK_THROWS(prepare_csf(CsfSpec::single(0, 2), SectorSpec{1, 1, 0}, 2));
}

TEST_CASE("interference states") {
  const SectorSpec sector{1, 1, 0};
  const auto a = prepare_csf(CsfSpec::closed_shell(), sector, 2);
  const auto b = prepare_csf(CsfSpec::double_exc(0, 1), sector, 2);

  const auto plus = prepare_interference(a, b, +1);
  const auto minus = prepare_interference(a, b, -1);
  CHECK(plus.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(inner(plus, minus)) < 1e-14);

  // Off-diagonal extraction identity against a direct inner product.
  const auto ints = fix_b();
  const auto h = map_hamiltonian(ints);
  const double off =
      0.5 * (h.expectation(plus) - h.expectation(minus));
  const double direct = inner(a, h.apply(b)).real();
  CHECK(off == doctest::Approx(direct).epsilon(1e-12));

  CHECK_THROWS(prepare_interference(a, a, +1));  // not orthogonal
  CHECK_THROWS(prepare_interference(a, b, 2));
}

TEST_CASE("fabric layout bookkeeping") {
  CHECK(FabricLayout(1, 3).n_parameters() == 0);
  CHECK(FabricLayout(2, 1).n_parameters() == 2);   // single even pair
  CHECK(FabricLayout(4, 1).n_parameters() == 6);   // pairs (0,1),(2,3),(1,2)
  CHECK(FabricLayout(4, 2).n_parameters() == 12);
  CHECK(FabricLayout(5, 1).n_parameters() == 8);   // (0,1),(2,3) + (1,2),(3,4)
}

TEST_CASE("zero parameters give the identity") {
  const auto layout = FabricLayout(4, 2);
  const auto psi = random_state(8, 3);
  const auto out = apply_fabric(psi, layout, FabricParameters(12, 0.0));
  for (std::size_t i = 0; i < psi.dim(); ++i) {
    CHECK(std::abs(out[i] - psi[i]) < 1e-15);
  }
}

TEST_CASE("fabric is unitary and preserves quantum numbers") {
  const auto layout = FabricLayout(4, 1);
  const auto ops = map_number_operators(4);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto theta = random_theta(layout, 900 + seed);
    const auto psi = random_sector_state(4, 2, 2, 50 + seed, false);
    const double na0 = ops.n_alpha.expectation(psi);
    const double nb0 = ops.n_beta.expectation(psi);
    const double s20 = ops.s2.expectation(psi);

    const auto out = apply_fabric(psi, layout, theta);
    CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ops.n_alpha.expectation(out) == doctest::Approx(na0).epsilon(1e-12));
    CHECK(ops.n_beta.expectation(out) == doctest::Approx(nb0).epsilon(1e-12));
    CHECK(std::abs(ops.s2.expectation(out) - s20) < 1e-12);
  }
}

TEST_CASE("reversed circuit with negated parameters inverts the fabric") {
  const auto layout = FabricLayout(4, 2);
  const auto theta = random_theta(layout, 12);
  const auto psi = random_state(8, 5);
  auto out = apply_fabric(psi, layout, theta);
  const auto& gates = layout.gates();
  for (int g = layout.n_parameters() - 1; g >= 0; --g) {
    apply_gate_inplace(out, gates[g], -theta[g]);
  }
  out -= psi;
  CHECK(out.norm() < 1e-12);
}

TEST_CASE("pair exchange acts in the paired subspace only") {
  const SectorSpec sector{1, 1, 0};
  auto psi = prepare_csf(CsfSpec::closed_shell(), sector, 2);  // |0011>
  apply_gate_inplace(psi, {GateKind::PairExchange, 0}, 0.7);
  CHECK(psi[0b0011].real() == doctest::Approx(std::cos(0.7)));
  CHECK(std::abs(psi[0b1100]) == doctest::Approx(std::abs(std::sin(0.7))));
}

TEST_CASE("parameter length mismatch throws") {
  const auto layout = FabricLayout(2, 1);
  const auto psi = Statevector::vacuum(4);
  CHECK_THROWS(apply_fabric(psi, layout, FabricParameters(3, 0.0)));
}

TEST_CASE("direct Hamiltonian application: closed forms") {
  const auto ints = fix_a();
  const auto both = Statevector::basis_state(2, 3);
  const auto out = apply_hamiltonian_direct(ints, both);
  // H|1 1bar> = (E_ext + 2h + J)|1 1bar> = -1.2 |1 1bar>.
  CHECK(out[3].real() == doctest::Approx(-1.2).epsilon(1e-14));
  for (std::size_t i = 0; i < out.dim(); ++i) {
    if (i != 3) CHECK(std::abs(out[i]) < 1e-15);
  }

  ActiveSpaceIntegrals scalar(3, 0.6);
  const auto psi = random_state(6, 31);
  const auto scaled = apply_hamiltonian_direct(scalar, psi);
  for (std::size_t i = 0; i < psi.dim(); ++i) {
    CHECK(std::abs(scaled[i] - 0.6 * psi[i]) < 1e-15);
  }
}

TEST_CASE("direct application matches the Pauli route") {
  const int m = 3;
  const auto ints = random_integrals(m, 71);
  const auto h = map_hamiltonian(ints);
  const auto psi = random_sector_state(m, 2, 1, 88, false);

  auto direct = apply_hamiltonian_direct(ints, psi);
  const auto pauli = h.apply(psi);
  direct -= pauli;
  CHECK(direct.norm() < 1e-11);

  // Twice-applied Hamiltonian against the dense oracle.
  const auto h2 = apply_hamiltonian_direct(
      ints, apply_hamiltonian_direct(ints, psi));
  const Mat dense = dense_hamiltonian(ints);
  const Vec expect = dense * (dense * to_eigen(psi));
  CHECK((to_eigen(h2) - expect).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("direct application matches the Pauli route at M=4") {
  const auto ints = testing::fix_c();
  const auto h = map_hamiltonian(ints);
  const auto psi = random_sector_state(4, 2, 2, 19);
  auto direct = apply_hamiltonian_direct(ints, psi);
  direct -= h.apply(psi);
  CHECK(direct.norm() < 1e-11);
}

TEST_CASE("direct densities: closed forms and dual route") {
  const auto both = Statevector::basis_state(2, 3);
  const auto d = direct_densities(both, 1);
  CHECK(d.opdm_at(0, 0) == doctest::Approx(2.0));
  CHECK(d.tpdm_at(0, 0, 0, 0) == doctest::Approx(2.0));
  CHECK(d.opdm_trace() == doctest::Approx(2.0));

  const auto vac = Statevector::vacuum(4);
  const auto dv = direct_densities(vac, 2);
  for (double v : dv.opdm) CHECK(v == 0.0);
  for (double v : dv.tpdm) CHECK(v == 0.0);

  // Random singlet state: equals the Pauli backtransformation.
  const auto psi = random_sector_state(2, 1, 1, 5);
  const auto direct = direct_densities(psi, 2);
  const auto jac = integral_jacobian(2);
  std::map<PauliWord, double> expectations;
  for (const auto& w : jac.word_support()) {
    expectations[w] = word_expectation(w, psi).real();
  }
  const auto bt = jac.backtransform(expectations);
  for (std::size_t i = 0; i < direct.tpdm.size(); ++i) {
    CHECK(direct.tpdm[i] == doctest::Approx(bt.tpdm[i]).epsilon(1e-12));
  }
  CHECK(direct.opdm_trace() == doctest::Approx(2.0).epsilon(1e-13));

  Statevector not_normalized = psi;
  not_normalized *= 2.0;
  CHECK_THROWS(direct_densities(not_normalized, 2));
}

TEST_CASE("trace formula from direct densities") {
  const int m = 3;
  const auto ints = random_integrals(m, 15);
  const auto psi = random_sector_state(m, 2, 2, 61);
  const auto d = direct_densities(psi, m);
  CHECK(trace_formula_energy(ints, d) ==
        doctest::Approx(hamiltonian_expectation_direct(ints, psi))
            .epsilon(1e-10));
}
