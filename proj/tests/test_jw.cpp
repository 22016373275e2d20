#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mcvqe/jw.hpp"
#include "mcvqe/sim.hpp"
#include "oracles.hpp"

using namespace mcvqe;
using namespace mcvqe::testing;

TEST_CASE("M=1 closed forms") {
  const auto ints = fix_a();
  const auto h = map_hamiltonian(ints);

  // <1 1bar| H |1 1bar> = E_ext + 2h + J.
  const auto both = Statevector::basis_state(2, 3);
  CHECK(h.expectation(both) == doctest::Approx(0.3 - 2.0 + 0.5).epsilon(1e-14));

  // Identity coefficient: E_ext + h + J/4.
  CHECK(h.coefficient(PauliWord::identity(2)) ==
        doctest::Approx(0.3 - 1.0 + 0.125).epsilon(1e-14));
}

TEST_CASE("scalar Hamiltonian is c*I") {
  ActiveSpaceIntegrals ints(2, 1.75);
  const auto h = map_hamiltonian(ints);
  CHECK(h.n_terms() == 1);
  CHECK(h.coefficient(PauliWord::identity(4)) == 1.75);
}

TEST_CASE("dense matrix equals Fock-space Hamiltonian (seeded, M=1..3)") {
  for (int m = 1; m <= 3; ++m) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto ints = random_integrals(m, 1000 * m + seed);
      const Mat lhs = dense_operator(map_hamiltonian(ints));
      const Mat rhs = dense_hamiltonian(ints);
      CAPTURE(m);
      CAPTURE(seed);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("Hamiltonian is Hermitian with real coefficients") {
  const auto h = map_hamiltonian(random_integrals(3, 5));
  const Mat dense = dense_operator(h);
  CHECK((dense - dense.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("number operators") {
  const int m = 2;
  const auto ops = map_number_operators(m);

  // Single beta electron: N_alpha = 0, N_beta = 1.
  const auto beta_state = Statevector::basis_state(2 * m, 0b0010);
  CHECK(ops.n_alpha.expectation(beta_state) == doctest::Approx(0.0));
  CHECK(ops.n_beta.expectation(beta_state) == doctest::Approx(1.0));

  CHECK((dense_operator(ops.n_alpha) - dense_number_alpha(m))
            .cwiseAbs()
            .maxCoeff() < 1e-13);
  CHECK((dense_operator(ops.n_beta) - dense_number_beta(m))
            .cwiseAbs()
            .maxCoeff() < 1e-13);
  CHECK((dense_operator(ops.s2) - dense_s2(m)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("S^2 on singlet and triplet combinations") {
  const int m = 2;
  const auto ops = map_number_operators(m);
  // Open-shell determinants |0a 1b> and |0b 1a>.
  const auto det1 = Statevector::basis_state(4, 0b1001);
  const auto det2 = Statevector::basis_state(4, 0b0110);

  Statevector singlet(4), triplet(4);
  const double inv = 1.0 / std::sqrt(2.0);
  singlet.axpy(inv, det1);
  singlet.axpy(-inv, det2);
  triplet.axpy(inv, det1);
  triplet.axpy(inv, det2);

  const double s_singlet = ops.s2.expectation(singlet);
  const double s_triplet = ops.s2.expectation(triplet);
  // One of the two combinations is the singlet (0), the other the triplet (2);
  // which is which depends on the fermionic sign convention.
  CHECK(std::min(s_singlet, s_triplet) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::max(s_singlet, s_triplet) == doctest::Approx(2.0).epsilon(1e-12));

  // Verified against the dense oracle.
  const Mat s2 = dense_s2(m);
  const Vec v1 = to_eigen(singlet);
  CHECK(std::abs(std::complex<double>(v1.dot(s2 * v1)) -
                 std::complex<double>(s_singlet)) < 1e-12);
}

TEST_CASE("Hamiltonian commutes with the quantum-number operators") {
  for (int m = 1; m <= 3; ++m) {
    const auto ints = random_integrals(m, 300 + m);
    const Mat h = dense_operator(map_hamiltonian(ints));
    const Mat na = dense_number_alpha(m);
    const Mat nb = dense_number_beta(m);
    const Mat s2 = dense_s2(m);
    CHECK((h * na - na * h).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((h * nb - nb * h).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((h * s2 - s2 * h).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Jacobian has the expected M=1 one-body entry") {
  const auto jac = integral_jacobian(1);
  bool found = false;
  for (const auto& e : jac.entries()) {
    if (e.element == ElementId::one_body(0, 0) &&
        e.word == PauliWord::single(2, 0, 'Z')) {
      CHECK(e.coeff == doctest::Approx(-0.5));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("Jacobian contraction reproduces map_hamiltonian") {
  const auto ints = fix_a();
  const auto jac = integral_jacobian(1);
  auto h = jac.contract(ints);
  h.add_term(PauliWord::identity(2), ints.e_ext());
  const auto href = map_hamiltonian(ints);
  CHECK(h.n_terms() == href.n_terms());
  for (const auto& [w, c] : href.terms()) {
    CHECK(h.coefficient(w) == doctest::Approx(c).epsilon(1e-14));
  }
}

TEST_CASE("Jacobian column matches finite differences of coefficients") {
  const int m = 3;
  const auto ints = random_integrals(m, 21);
  const auto jac = integral_jacobian(m);
  const double step = 1e-6;

  for (const auto& el :
       {ElementId::eri(0, 1, 1, 2), ElementId::eri(0, 0, 1, 1),
        ElementId::eri(0, 1, 0, 1), ElementId::one_body(0, 2)}) {
    const auto hp = map_hamiltonian(ints.perturbed(el, step));
    const auto hm = map_hamiltonian(ints.perturbed(el, -step));

    std::map<PauliWord, double> fd;
    for (const auto& [w, c] : hp.terms()) fd[w] += c / (2 * step);
    for (const auto& [w, c] : hm.terms()) fd[w] -= c / (2 * step);

    std::map<PauliWord, double> column;
    for (const auto& e : jac.entries()) {
      if (e.element == el) column[e.word] += e.coeff;
    }
    for (const auto& [w, v] : fd) {
      CAPTURE(el.to_string());
      CAPTURE(w.to_string());
      const auto it = column.find(w);
      const double expect = it == column.end() ? 0.0 : it->second;
      CHECK(std::abs(v - expect) < 1e-8);
    }
  }
}

TEST_CASE("backtransform of the doubly occupied M=1 state") {
  const auto jac = integral_jacobian(1);
  const auto h = map_hamiltonian(fix_a());
  const auto state = Statevector::basis_state(2, 3);

  std::map<PauliWord, double> expectations;
  for (const auto& w : jac.word_support()) {
    expectations[w] = word_expectation(w, state).real();
  }
  const auto d = jac.backtransform(expectations);
  CHECK(d.opdm_at(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.tpdm_at(0, 0, 0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.flavor == DensityFlavor::Unrelaxed);

  // Trace formula: E_ext + sum gamma h + 1/2 sum Gamma (pq|rs).
  CHECK(trace_formula_energy(fix_a(), d) ==
        doctest::Approx(h.expectation(state)).epsilon(1e-13));
}

TEST_CASE("backtransform of the vacuum is zero") {
  const auto jac = integral_jacobian(2);
  const auto vac = Statevector::vacuum(4);
  std::map<PauliWord, double> expectations;
  for (const auto& w : jac.word_support()) {
    expectations[w] = word_expectation(w, vac).real();
  }
  const auto d = jac.backtransform(expectations);
  for (double v : d.opdm) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
  for (double v : d.tpdm) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("backtransform equals direct fermionic densities") {
  const int m = 2;
  const auto jac = integral_jacobian(m);
  const auto psi = random_sector_state(m, 1, 1, 77);

  std::map<PauliWord, double> expectations;
  for (const auto& w : jac.word_support()) {
    expectations[w] = word_expectation(w, psi).real();
  }
  const auto bt = jac.backtransform(expectations);
  const auto direct = direct_densities(psi, m);

  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      CHECK(bt.opdm_at(p, q) ==
            doctest::Approx(direct.opdm_at(p, q)).epsilon(1e-12));
  for (std::size_t i = 0; i < bt.tpdm.size(); ++i)
    CHECK(bt.tpdm[i] == doctest::Approx(direct.tpdm[i]).epsilon(1e-12));
}

TEST_CASE("trace formula holds for random states") {
  const int m = 3;
  const auto ints = random_integrals(m, 8);
  const auto jac = integral_jacobian(m);
  const auto h = map_hamiltonian(ints);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto psi = random_sector_state(m, 2, 1, 400 + seed);
    std::map<PauliWord, double> expectations;
    for (const auto& w : jac.word_support()) {
      expectations[w] = word_expectation(w, psi).real();
    }
    const auto d = jac.backtransform(expectations);
    CHECK(trace_formula_energy(ints, d) ==
          doctest::Approx(h.expectation(psi)).epsilon(1e-10));
    CHECK(d.symmetry_residual() == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("missing word expectation is an error") {
  const auto jac = integral_jacobian(1);
  std::map<PauliWord, double> empty;
  CHECK_THROWS(jac.backtransform(empty));
}

TEST_CASE("antisymmetry nulls: constant ERI tensor has no same-spin double hops") {
  // With (pq|rs) = c for all indices, every antisymmetrized integral
  // <pq||rs> vanishes, so four-index same-spin words (e.g. X Z X X Z X on one
  // spin) must be absent.
  const int m = 4;
  ActiveSpaceIntegrals ints(m);
  for (int p = 0; p < m; ++p)
    for (int q = p; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = r; s < m; ++s) ints.set_eri(p, q, r, s, 0.37);
  const auto h = map_hamiltonian(ints);
  for (const auto& [w, c] : h.terms()) {
    // Hop endpoints are X/Y letters; a same-spin double hop carries four of
    // them on one spin's qubits.
    int alpha = 0, beta = 0;
    for (int q = 0; q < 2 * m; ++q) {
      const char l = w.letter(q);
      if (l != 'X' && l != 'Y') continue;
      (q % 2 == 0 ? alpha : beta)++;
    }
    const bool same_spin_four = (alpha >= 4 && beta == 0) ||
                                (beta >= 4 && alpha == 0);
    CAPTURE(w.to_string());
    CHECK(!same_spin_four);
  }
}
