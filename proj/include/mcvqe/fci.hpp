#pragma once

#include <cstdint>
#include <vector>

#include "mcvqe/density.hpp"
#include "mcvqe/integrals.hpp"
#include "mcvqe/response.hpp"
#include "mcvqe/statevector.hpp"

namespace mcvqe {

/// Computational-basis determinants with fixed (N_alpha, N_beta), in
/// ascending basis-index order.
struct SectorBasis {
  int m = 0;
  int n_alpha = 0;
  int n_beta = 0;
  std::vector<std::uint64_t> states;

  static SectorBasis build(int m, const SectorSpec& sector);
  std::size_t size() const { return states.size(); }
  int index_of(std::uint64_t det) const;
};

struct FciOptions {
  int dense_threshold = 2000;   // dense eigensolve below, Davidson above
  double residual_tol = 1e-10;  // Davidson residual norm
  int max_iterations = 400;
  double spin_tol = 1e-8;       // |<S^2> - target| acceptance window
};

struct FciResult {
  std::vector<double> energies;
  std::vector<Statevector> states;  // embedded in the full 4^M register
  std::vector<DensityPair> densities;
};

/// Lowest n_states eigenpairs of H restricted to the (N_alpha, N_beta)
/// sector, post-filtered to the sector's S^2 eigenvalue; densities from the
/// direct fermionic route. Matrix-free Davidson above the dense threshold,
/// both built on the direct Hamiltonian application (independent of the
/// Pauli route). Supports M <= 8.
FciResult fci_solve(const ActiveSpaceIntegrals& ints, const SectorSpec& sector,
                    int n_states, const FciOptions& options = {});

/// <S^2> via ladder operators (no Pauli expansion).
double s2_expectation_direct(const Statevector& state, int m);

struct FdGradientOptions {
  double step = 1e-5;
  double gtol = 1e-11;  // tightened so optimizer noise stays below the
                        // central-difference comparison tolerance
  int max_iterations = 2000;
};

/// Central-difference total derivative of the MC-VQE state energy per
/// canonical integral orbit (and E_ext), re-running the full pipeline at
/// each displacement, warm-started from the base solution.
GradientRecord fd_total_gradient(const McVqeProblem& problem, int state,
                                 const McVqeSolution& base,
                                 const FdGradientOptions& options = {});

}  // namespace mcvqe
