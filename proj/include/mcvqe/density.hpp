#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mcvqe {

class ActiveSpaceIntegrals;

enum class DensityFlavor { Unrelaxed, Response, Relaxed };

std::string to_string(DensityFlavor f);

/// Spin-summed one- and two-particle density matrices over M spatial
/// orbitals. The OPDM is symmetric; the TPDM carries the full 8-fold ERI
/// permutation symmetry (it is the derivative conjugate of (pq|rs)).
struct DensityPair {
  DensityFlavor flavor = DensityFlavor::Unrelaxed;
  int m = 0;
  std::vector<double> opdm;  // M*M row-major
  std::vector<double> tpdm;  // M^4, index ((p*M+q)*M+r)*M+s

  static DensityPair zero(int m, DensityFlavor flavor);

  double opdm_at(int p, int q) const {
    return opdm[static_cast<std::size_t>(p) * m + q];
  }
  double& opdm_at(int p, int q) {
    return opdm[static_cast<std::size_t>(p) * m + q];
  }
  double tpdm_at(int p, int q, int r, int s) const {
    return tpdm[((static_cast<std::size_t>(p) * m + q) * m + r) * m + s];
  }
  double& tpdm_at(int p, int q, int r, int s) {
    return tpdm[((static_cast<std::size_t>(p) * m + q) * m + r) * m + s];
  }

  double opdm_trace() const;

  /// Largest deviation from the symmetries the pair is supposed to carry.
  double symmetry_residual() const;
};

/// E_ext + sum_pq gamma_pq (p|h|q) + 1/2 sum_pqrs Gamma_pqrs (pq|rs).
double trace_formula_energy(const ActiveSpaceIntegrals& ints,
                            const DensityPair& d);

}  // namespace mcvqe
