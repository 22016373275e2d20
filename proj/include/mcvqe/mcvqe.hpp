#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "mcvqe/integrals.hpp"
#include "mcvqe/sim.hpp"

namespace mcvqe {

/// One MC-VQE computation: integrals, sector, entangler layout, reference
/// CSFs and non-increasing state-averaging weights (normalized to sum 1).
/// The prepared reference statevectors are cached at construction.
struct McVqeProblem {
  ActiveSpaceIntegrals ints;
  SectorSpec sector;
  FabricLayout layout;
  std::vector<CsfSpec> reference_specs;
  std::vector<double> weights;
  std::vector<Statevector> references;

  static McVqeProblem build(ActiveSpaceIntegrals ints, SectorSpec sector,
                            FabricLayout layout, int n_states,
                            std::vector<double> weights = {});

  int n_states() const { return static_cast<int>(reference_specs.size()); }
  int n_parameters() const { return layout.n_parameters(); }
};

/// Reference selection: the candidate pool is the closed-shell CSF, all
/// singlet singles and all diagonal doubles; the n_states lowest diagonal
/// energies win, ties broken by (kind, i, a) order.
std::vector<CsfSpec> select_references(const ActiveSpaceIntegrals& ints,
                                       const SectorSpec& sector, int n_states);

/// U(theta) |Phi_Theta>.
Statevector entangled_reference(const McVqeProblem& problem,
                                const FabricParameters& theta, int state);

/// State-averaged energy sum_Theta w_Theta <Gamma|H|Gamma>.
double sa_energy(const McVqeProblem& problem, const FabricParameters& theta);

/// Parameter-shift gradient of the state-averaged energy.
Eigen::VectorXd sa_energy_gradient(const McVqeProblem& problem,
                                   const FabricParameters& theta);

struct OptimizeOptions {
  double gtol = 1e-8;
  int max_iterations = 1000;
  /// Optional frozen Hessian for the Newton polishing phase; used by
  /// warm-started re-optimizations at slightly displaced integrals, where
  /// the Hessian at the base point is an adequate quasi-Newton model. The
  /// exact Hessian is still computed on demand if the frozen one stalls.
  std::optional<Eigen::MatrixXd> polish_hessian;
};

struct OptimizeResult {
  FabricParameters theta;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;  // final max-norm of the SA gradient
  std::vector<double> energy_trace;
  std::vector<double> gnorm_trace;
};

/// Limited-memory quasi-Newton minimization of the SA energy on
/// parameter-shift gradients with a backtracking line search, followed by
/// Newton polishing on the exact parameter Hessian to drive the gradient
/// max-norm below gtol.
OptimizeResult sa_vqe_optimize(const McVqeProblem& problem,
                               const FabricParameters& theta_init,
                               const OptimizeOptions& options = {});

/// Subspace Hamiltonian over entangled references: diagonal from plain
/// expectation values, off-diagonal from interference-state differences.
Eigen::MatrixXd subspace_hamiltonian(const McVqeProblem& problem,
                                     const FabricParameters& theta);

struct SubspaceResult {
  Eigen::MatrixXd hamiltonian;
  Eigen::MatrixXd eigenvectors;  // columns sign-fixed
  Eigen::VectorXd energies;      // ascending
  double min_gap = 0.0;
  bool conditioning_warning = false;  // min_gap < 1e-8
};

SubspaceResult diagonalize_subspace(const Eigen::MatrixXd& h);

/// Rotated reference |Omega_Theta> = sum_Theta' V(Theta',Theta) |Phi_Theta'>.
Statevector rotated_reference(const std::vector<Statevector>& references,
                              const Eigen::MatrixXd& eigenvectors, int state);

/// <Omega_Theta| U+ H U |Omega_Theta> with the subspace eigenvectors held
/// fixed.
double state_energy(const McVqeProblem& problem, const FabricParameters& theta,
                    const Eigen::MatrixXd& eigenvectors, int state);

struct McVqeSolution {
  OptimizeResult opt;
  SubspaceResult subspace;
};

/// Full energy pipeline: optimize, then build and diagonalize the subspace
/// Hamiltonian.
McVqeSolution solve_mcvqe(const McVqeProblem& problem,
                          const FabricParameters& theta_init,
                          const OptimizeOptions& options = {});

/// Zero parameters plus a seeded jitter of the given magnitude (jitter keeps
/// the optimizer away from symmetry-stationary saddle points; recorded by
/// callers for reproducibility).
FabricParameters initial_parameters(const FabricLayout& layout,
                                    std::uint64_t seed,
                                    double jitter = 1e-2);

}  // namespace mcvqe
