#include "mcvqe/sim.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include "mcvqe/jw.hpp"

namespace mcvqe {

namespace {

// Physical-qubit mask of all modes logically below (spin, p).
std::uint64_t predecessor_mask(int m, int spin, int p) {
  std::uint64_t mask = 0;
  if (spin == 0) {
    for (int t = 0; t < p; ++t) mask |= std::uint64_t{1} << (2 * t);
  } else {
    for (int t = 0; t < m; ++t) mask |= std::uint64_t{1} << (2 * t);
    for (int t = 0; t < p; ++t) mask |= std::uint64_t{1} << (2 * t + 1);
  }
  return mask;
}

void check_state(const Statevector& s, int m) {
  if (s.n_qubits() != 2 * m) {
    throw std::invalid_argument("state dimension does not match 4^M");
  }
}

}  // namespace

void apply_ladder(Statevector& state, int m, int spin, int p, bool dagger) {
  check_state(state, m);
  const std::uint64_t bit = std::uint64_t{1}
                            << QubitLayout::spin_qubit(p, spin);
  const std::uint64_t pred = predecessor_mask(m, spin, p);
  Statevector out(state.n_qubits());
  for (std::uint64_t b = 0; b < state.dim(); ++b) {
    const auto a = state[b];
    if (a == std::complex<double>{0.0, 0.0}) continue;
    const bool occupied = (b & bit) != 0;
    if (dagger == occupied) continue;
    const double sign = (std::popcount(b & pred) & 1) ? -1.0 : 1.0;
    out[b ^ bit] += sign * a;
  }
  state = std::move(out);
}

void accumulate_spin_hop(Statevector& y, const Statevector& x, int m, int spin,
                         int p, int q, double coeff) {
  check_state(x, m);
  check_state(y, m);
  const std::uint64_t cb = std::uint64_t{1} << QubitLayout::spin_qubit(p, spin);
  const std::uint64_t ab = std::uint64_t{1} << QubitLayout::spin_qubit(q, spin);
  if (p == q) {
    for (std::uint64_t b = 0; b < x.dim(); ++b) {
      if (b & ab) y[b] += coeff * x[b];
    }
    return;
  }
  const std::uint64_t pred_q = predecessor_mask(m, spin, q);
  const std::uint64_t pred_p = predecessor_mask(m, spin, p);
  for (std::uint64_t b = 0; b < x.dim(); ++b) {
    if (!(b & ab) || (b & cb)) continue;
    const auto a = x[b];
    if (a == std::complex<double>{0.0, 0.0}) continue;
    const std::uint64_t b1 = b ^ ab;
    const int par =
        (std::popcount(b & pred_q) + std::popcount(b1 & pred_p)) & 1;
    y[b1 | cb] += (par ? -coeff : coeff) * a;
  }
}

void accumulate_excitation(Statevector& y, const Statevector& x, int m, int p,
                           int q, double coeff) {
  accumulate_spin_hop(y, x, m, 0, p, q, coeff);
  accumulate_spin_hop(y, x, m, 1, p, q, coeff);
}

Statevector apply_hamiltonian_direct(const ActiveSpaceIntegrals& ints,
                                     const Statevector& state) {
  const int m = ints.n_orbitals();
  check_state(state, m);
  Statevector y = state;
  y *= ints.e_ext();

  const auto kappa = kappa_matrix(ints);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      const double k = kappa[static_cast<std::size_t>(p) * m + q];
      if (k != 0.0) accumulate_excitation(y, state, m, p, q, k);
    }
  }

  Statevector t(state.n_qubits());
  for (int r = 0; r < m; ++r) {
    for (int s = 0; s < m; ++s) {
      t.set_zero();
      accumulate_excitation(t, state, m, r, s, 1.0);
      for (int p = 0; p < m; ++p) {
        for (int q = 0; q < m; ++q) {
          const double v = 0.5 * ints.eri(p, q, r, s);
          if (v != 0.0) accumulate_excitation(y, t, m, p, q, v);
        }
      }
    }
  }
  return y;
}

double hamiltonian_expectation_direct(const ActiveSpaceIntegrals& ints,
                                      const Statevector& state) {
  return inner(state, apply_hamiltonian_direct(ints, state)).real();
}

double hamiltonian_matrix_element_direct(const ActiveSpaceIntegrals& ints,
                                         const Statevector& a,
                                         const Statevector& b) {
  return inner(a, apply_hamiltonian_direct(ints, b)).real();
}

DensityPair direct_densities(const Statevector& state, int m) {
  check_state(state, m);
  if (std::abs(state.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("densities require a normalized state");
  }

  std::vector<Statevector> t(static_cast<std::size_t>(m) * m);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      Statevector v(state.n_qubits());
      accumulate_excitation(v, state, m, p, q, 1.0);
      t[static_cast<std::size_t>(p) * m + q] = std::move(v);
    }
  }

  DensityPair d = DensityPair::zero(m, DensityFlavor::Unrelaxed);
  std::vector<double> gamma_raw(static_cast<std::size_t>(m) * m);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      gamma_raw[static_cast<std::size_t>(p) * m + q] =
          inner(state, t[static_cast<std::size_t>(p) * m + q]).real();
    }
  }
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      d.opdm_at(p, q) = 0.5 * (gamma_raw[static_cast<std::size_t>(p) * m + q] +
                               gamma_raw[static_cast<std::size_t>(q) * m + p]);
    }
  }

  // Normal-ordered raw TPDM, then average over the 8-fold orbit.
  std::vector<double> raw(d.tpdm.size());
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
          double v = inner(t[static_cast<std::size_t>(q) * m + p],
                           t[static_cast<std::size_t>(r) * m + s])
                         .real();
          if (q == r) v -= gamma_raw[static_cast<std::size_t>(p) * m + s];
          raw[((static_cast<std::size_t>(p) * m + q) * m + r) * m + s] = v;
        }
  // One orbit average written to every member keeps the 8-fold symmetry
  // exact rather than up to summation roundoff.
  auto at = [&](int p, int q, int r, int s) {
    return raw[((static_cast<std::size_t>(p) * m + q) * m + r) * m + s];
  };
  for (const auto& el : ActiveSpaceIntegrals(m).canonical_elements()) {
    if (el.kind != ElementId::Kind::Eri) continue;
    const int p = el.p, q = el.q, r = el.r, s = el.s;
    const double v =
        0.125 * (at(p, q, r, s) + at(q, p, r, s) + at(p, q, s, r) +
                 at(q, p, s, r) + at(r, s, p, q) + at(s, r, p, q) +
                 at(r, s, q, p) + at(s, r, q, p));
    const int perms[8][4] = {{p, q, r, s}, {q, p, r, s}, {p, q, s, r},
                             {q, p, s, r}, {r, s, p, q}, {s, r, p, q},
                             {r, s, q, p}, {s, r, q, p}};
    for (const auto& t : perms) d.tpdm_at(t[0], t[1], t[2], t[3]) = v;
  }
  return d;
}

bool CsfSpec::operator<(const CsfSpec& o) const {
  return std::tie(kind, occ, virt) < std::tie(o.kind, o.occ, o.virt);
}

std::string CsfSpec::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::ClosedShell:
      os << "phi0";
      break;
    case Kind::SingletSingle:
      os << "S(" << occ << "->" << virt << ")";
      break;
    case Kind::DiagonalDouble:
      os << "D(" << occ << "->" << virt << ")";
      break;
  }
  return os.str();
}

Statevector prepare_csf(const CsfSpec& spec, const SectorSpec& sector, int m) {
  sector.validate(m);
  if (sector.n_alpha != sector.n_beta || sector.spin_s != 0) {
    throw std::invalid_argument(
        "closed-shell CSF kinds require a singlet sector with N_alpha == "
        "N_beta");
  }
  const int nocc = sector.n_alpha;

  Statevector phi0 = Statevector::vacuum(2 * m);
  for (int i = nocc - 1; i >= 0; --i) {
    apply_ladder(phi0, m, 1, i, true);
    apply_ladder(phi0, m, 0, i, true);
  }
  if (spec.kind == CsfSpec::Kind::ClosedShell) return phi0;

  const int i = spec.occ;
  const int a = spec.virt;
  if (i < 0 || i >= nocc || a < nocc || a >= m) {
    throw std::out_of_range("CSF excitation indices out of range");
  }

  if (spec.kind == CsfSpec::Kind::SingletSingle) {
    Statevector sa = phi0;
    apply_ladder(sa, m, 0, i, false);
    apply_ladder(sa, m, 0, a, true);
    Statevector sb = phi0;
    apply_ladder(sb, m, 1, i, false);
    apply_ladder(sb, m, 1, a, true);
    sa += sb;
    sa *= std::complex<double>{1.0 / std::sqrt(2.0), 0.0};
    return sa;
  }

  // Diagonal double a+ i abar+ ibar |phi0>, applied right to left.
  Statevector d = phi0;
  apply_ladder(d, m, 1, i, false);
  apply_ladder(d, m, 1, a, true);
  apply_ladder(d, m, 0, i, false);
  apply_ladder(d, m, 0, a, true);
  return d;
}

Statevector prepare_interference(const Statevector& a, const Statevector& b,
                                 int sign) {
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("interference sign must be +1 or -1");
  }
  if (std::abs(inner(a, b)) > 1e-12) {
    throw std::invalid_argument("interference states must be orthogonal");
  }
  Statevector out = a;
  if (sign == 1) {
    out += b;
  } else {
    out -= b;
  }
  out *= std::complex<double>{1.0 / std::sqrt(2.0), 0.0};
  return out;
}

FabricLayout::FabricLayout(int m, int n_layers) : m_(m), n_layers_(n_layers) {
  if (m < 1) throw std::invalid_argument("need at least one orbital");
  if (n_layers < 0) throw std::invalid_argument("negative layer count");
  for (int layer = 0; layer < n_layers; ++layer) {
    for (int parity = 0; parity < 2; ++parity) {
      for (int p = parity; p + 1 < m; p += 2) {
        gates_.push_back({GateKind::PairExchange, p});
        gates_.push_back({GateKind::OrbitalRotation, p});
      }
    }
  }
}

std::array<std::array<double, 16>, 16> gate_matrix(GateKind kind,
                                                   double theta) {
  std::array<std::array<double, 16>, 16> u{};
  for (int i = 0; i < 16; ++i) u[i][i] = 1.0;
  if (kind == GateKind::PairExchange) {
    // Rotation between |pair on p> (local 0011 -> index 3) and
    // |pair on p+1> (local 1100 -> index 12).
    const double c = std::cos(theta), s = std::sin(theta);
    u[3][3] = c;
    u[12][3] = s;
    u[3][12] = -s;
    u[12][12] = c;
    return u;
  }
  // Spin-adapted orbital rotation: Givens rotation by theta/2 applied in the
  // alpha (local bits 0,2) and beta (local bits 1,3) one-particle sectors.
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  double g[4][4] = {{1, 0, 0, 0}, {0, c, s, 0}, {0, -s, c, 0}, {0, 0, 0, 1}};
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      const int ia = ((i >> 0) & 1) | (((i >> 2) & 1) << 1);
      const int ib = ((i >> 1) & 1) | (((i >> 3) & 1) << 1);
      const int ja = ((j >> 0) & 1) | (((j >> 2) & 1) << 1);
      const int jb = ((j >> 1) & 1) | (((j >> 3) & 1) << 1);
      u[i][j] = g[ia][ja] * g[ib][jb];
    }
  }
  return u;
}

void apply_gate_inplace(Statevector& state, const FabricGate& gate,
                        double theta) {
  const auto u = gate_matrix(gate.kind, theta);
  const int shift = 2 * gate.orbital;
  if (shift + 4 > state.n_qubits()) {
    throw std::invalid_argument("gate acts outside the register");
  }
  const std::uint64_t low_count = std::uint64_t{1} << shift;
  const std::uint64_t high_count = state.dim() >> (shift + 4);
  std::array<std::complex<double>, 16> local;
  for (std::uint64_t hi = 0; hi < high_count; ++hi) {
    for (std::uint64_t lo = 0; lo < low_count; ++lo) {
      const std::uint64_t base = (hi << (shift + 4)) | lo;
      for (int k = 0; k < 16; ++k) {
        local[k] = state[base | (std::uint64_t(k) << shift)];
      }
      for (int i = 0; i < 16; ++i) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < 16; ++j) {
          if (u[i][j] != 0.0) acc += u[i][j] * local[j];
        }
        state[base | (std::uint64_t(i) << shift)] = acc;
      }
    }
  }
}

void apply_fabric_inplace(Statevector& state, const FabricLayout& layout,
                          const FabricParameters& theta) {
  if (static_cast<int>(theta.size()) != layout.n_parameters()) {
    throw std::invalid_argument("parameter count does not match layout");
  }
  if (state.n_qubits() != 2 * layout.n_orbitals()) {
    throw std::invalid_argument("state does not match fabric layout");
  }
  for (std::size_t g = 0; g < theta.size(); ++g) {
    if (!std::isfinite(theta[g])) {
      throw std::invalid_argument("non-finite fabric parameter");
    }
    apply_gate_inplace(state, layout.gates()[g], theta[g]);
  }
}

Statevector apply_fabric(const Statevector& state, const FabricLayout& layout,
                         const FabricParameters& theta) {
  Statevector out = state;
  apply_fabric_inplace(out, layout, theta);
  return out;
}

}  // namespace mcvqe
