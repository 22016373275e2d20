#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <vector>

#include "mcvqe/density.hpp"
#include "mcvqe/mcvqe.hpp"
#include "mcvqe/shift_rules.hpp"

namespace mcvqe {

/// b_g = -dE_Theta/dtheta_g with the subspace eigenvectors held fixed; the
/// right-hand side of the SA-VQE response equations.
Eigen::VectorXd state_gradient_rhs(const McVqeProblem& problem,
                                   const FabricParameters& theta,
                                   const Eigen::MatrixXd& eigenvectors,
                                   int state);

/// Full SA-VQE parameter Hessian via the double parameter shift rule.
Eigen::MatrixXd sa_hessian_exact(const McVqeProblem& problem,
                                 const FabricParameters& theta);

/// Diagonal of the SA-VQE Hessian in a single linear-cost pass.
Eigen::VectorXd sa_hessian_diagonal(const McVqeProblem& problem,
                                    const FabricParameters& theta);

/// Matrix-free Hessian-vector product: a wide-step central-difference
/// directional derivative of the SA gradient along x/|x|, scaled by |x|.
/// n_fd must be one of {2, 4, 6, 8, 10}.
Eigen::VectorXd sa_hessian_matvec_fd(const McVqeProblem& problem,
                                     const FabricParameters& theta,
                                     const Eigen::VectorXd& x, int n_fd,
                                     double delta_fd);

/// Positive preconditioner from a Hessian diagonal: entries below the floor
/// in magnitude become 1, all others their absolute value.
Eigen::VectorXd condition_preconditioner(const Eigen::VectorXd& diagonal,
                                         double floor = 1e-8);

struct ResponseSolution {
  Eigen::VectorXd lambda;
  std::vector<double> residual_history;  // max-norm per pass, initial first
  int iterations = 0;                    // preconditioned update passes
  bool converged = false;
};

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Fixed-point iteration with Pulay DIIS extrapolation for A lambda = b with
/// a symmetric (possibly indefinite) operator. Non-convergence is reported
/// through the `converged` flag, never silently.
ResponseSolution solve_response_diis(const LinearOperator& matvec,
                                     const Eigen::VectorXd& b,
                                     const Eigen::VectorXd& precond_diag,
                                     double tol = 1e-9, int max_iterations = 60,
                                     int history_depth = 8);

/// Explicit solve through the eigendecomposition with singular-value cutoff.
Eigen::VectorXd pseudoinverse_solve(const Eigen::MatrixXd& a,
                                    const Eigen::VectorXd& b,
                                    double cutoff = 1e-10);

/// Unrelaxed densities of the MC-VQE state Psi_Theta = U Omega_Theta.
DensityPair unrelaxed_densities(const McVqeProblem& problem,
                                const FabricParameters& theta,
                                const Eigen::MatrixXd& eigenvectors,
                                int state);

/// State-averaged unrelaxed densities sum_Theta w_Theta D(Gamma_Theta).
DensityPair sa_density(const McVqeProblem& problem,
                       const FabricParameters& theta);

/// Response densities: the parameter-shift derivative of the state-averaged
/// unrelaxed densities contracted with the Lagrange multipliers.
DensityPair response_densities(const McVqeProblem& problem,
                               const FabricParameters& theta,
                               const Eigen::VectorXd& lambda);

/// Elementwise sum of matching unrelaxed and response pairs.
DensityPair relaxed_densities(const DensityPair& unrelaxed,
                              const DensityPair& response);

/// Total derivatives of the state energy with respect to the Hamiltonian
/// matrix elements: dE/d(p|h|q) per element (the relaxed OPDM), dE/d(pq|rs)
/// aggregated over each canonical ERI orbit, and dE/dE_ext = 1.
struct GradientRecord {
  int m = 0;
  double d_e_ext = 1.0;
  std::vector<double> d_one_body;      // M*M per-element values
  std::map<ElementId, double> d_eri;   // canonical orbit -> orbit derivative

  /// Total derivative when the element's whole symmetry orbit moves
  /// together (the quantity a central difference over `perturbed` sees).
  double orbit_derivative(const ElementId& id) const;
};

GradientRecord matrix_element_gradient(const DensityPair& relaxed,
                                       const ActiveSpaceIntegrals& ints);

/// Largest per-orbit deviation between two records (including dE/dE_ext).
double max_orbit_deviation(const GradientRecord& a, const GradientRecord& b);

enum class HessianMode { Exact, MatvecExact, MatvecFd };

struct GradientOptions {
  HessianMode mode = HessianMode::Exact;
  int n_fd = 4;
  double delta_fd = 0.2;
  double response_tol = 1e-9;
  int max_iterations = 60;
  double precond_floor = 1e-8;
};

struct StateGradient {
  Eigen::VectorXd rhs;
  ResponseSolution response;
  DensityPair unrelaxed;
  DensityPair response_density;
  DensityPair relaxed;
  GradientRecord record;
};

/// Full response-relaxed gradient pipeline for one MC-VQE state.
StateGradient compute_state_gradient(const McVqeProblem& problem,
                                     const McVqeSolution& solution, int state,
                                     const GradientOptions& options = {});

}  // namespace mcvqe
