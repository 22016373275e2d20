#include "mcvqe/response.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "mcvqe/linalg.hpp"

namespace mcvqe {

namespace {

ThetaFunction sa_energy_function(const McVqeProblem& problem) {
  return [&problem](const std::vector<double>& theta) {
    return sa_energy(problem, theta);
  };
}

void accumulate_density(DensityPair& acc, const DensityPair& d, double scale) {
  for (std::size_t i = 0; i < acc.opdm.size(); ++i) {
    acc.opdm[i] += scale * d.opdm[i];
  }
  for (std::size_t i = 0; i < acc.tpdm.size(); ++i) {
    acc.tpdm[i] += scale * d.tpdm[i];
  }
}

// Minimal-norm extrapolation coefficients for the DIIS history.
Eigen::VectorXd diis_coefficients(const std::deque<Eigen::VectorXd>& errors) {
  const int k = static_cast<int>(errors.size());
  Eigen::MatrixXd bordered = Eigen::MatrixXd::Zero(k + 1, k + 1);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) bordered(i, j) = errors[i].dot(errors[j]);
  }
  const double scale = bordered.topLeftCorner(k, k).cwiseAbs().maxCoeff();
  if (scale > 0.0) bordered.topLeftCorner(k, k) /= scale;
  for (int i = 0; i < k; ++i) {
    bordered(i, k) = 1.0;
    bordered(k, i) = 1.0;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs(k) = 1.0;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(bordered);
  const Eigen::VectorXd sol = cod.solve(rhs);
  return sol.head(k);
}

}  // namespace

Eigen::VectorXd state_gradient_rhs(const McVqeProblem& problem,
                                   const FabricParameters& theta,
                                   const Eigen::MatrixXd& eigenvectors,
                                   int state) {
  const ThetaFunction f = [&](const std::vector<double>& t) {
    return state_energy(problem, t, eigenvectors, state);
  };
  return -shift_gradient_all(f, theta, problem.layout);
}

Eigen::MatrixXd sa_hessian_exact(const McVqeProblem& problem,
                                 const FabricParameters& theta) {
  return shift_hessian(sa_energy_function(problem), theta, problem.layout);
}

Eigen::VectorXd sa_hessian_diagonal(const McVqeProblem& problem,
                                    const FabricParameters& theta) {
  return shift_hessian_diagonal(sa_energy_function(problem), theta,
                                problem.layout);
}

Eigen::VectorXd sa_hessian_matvec_fd(const McVqeProblem& problem,
                                     const FabricParameters& theta,
                                     const Eigen::VectorXd& x, int n_fd,
                                     double delta_fd) {
  const int n = problem.n_parameters();
  if (x.size() != n) throw std::invalid_argument("trial vector size mismatch");
  const double xnorm = x.norm();
  if (xnorm == 0.0) throw std::invalid_argument("zero trial vector");
  if (n_fd < 2 || n_fd > 10 || n_fd % 2 != 0) {
    throw std::invalid_argument("n_fd must be in {2, 4, 6, 8, 10}");
  }
  const FdStencil stencil = FdStencil::central(n_fd, delta_fd);

  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(n);
  std::vector<double> displaced(theta.size());
  for (int p = 0; p < stencil.n_points; ++p) {
    for (int k = 0; k < n; ++k) {
      displaced[k] = theta[k] + stencil.offsets[p] * x(k) / xnorm;
    }
    sigma += stencil.weights[p] * sa_energy_gradient(problem, displaced);
  }
  return sigma * xnorm;
}

Eigen::VectorXd condition_preconditioner(const Eigen::VectorXd& diagonal,
                                         double floor) {
  Eigen::VectorXd out(diagonal.size());
  for (int i = 0; i < diagonal.size(); ++i) {
    const double mag = std::abs(diagonal(i));
    out(i) = mag < floor ? 1.0 : mag;
  }
  return out;
}

ResponseSolution solve_response_diis(const LinearOperator& matvec,
                                     const Eigen::VectorXd& b,
                                     const Eigen::VectorXd& precond_diag,
                                     double tol, int max_iterations,
                                     int history_depth) {
  if (precond_diag.size() != b.size()) {
    throw std::invalid_argument("preconditioner size mismatch");
  }
  ResponseSolution sol;
  sol.lambda = Eigen::VectorXd::Zero(b.size());

  std::deque<Eigen::VectorXd> hist_lambda, hist_error;
  Eigen::VectorXd r = b;  // residual of the trivial zero guess
  for (;;) {
    const double rnorm = inf_norm(r);
    sol.residual_history.push_back(rnorm);
    if (rnorm < tol) {
      sol.converged = true;
      return sol;
    }
    if (sol.iterations >= max_iterations) {
      sol.converged = false;
      return sol;
    }
    ++sol.iterations;

    Eigen::VectorXd d(b.size());
    for (int i = 0; i < b.size(); ++i) d(i) = r(i) / precond_diag(i);
    sol.lambda += d;

    hist_lambda.push_back(sol.lambda);
    hist_error.push_back(r);
    while (static_cast<int>(hist_lambda.size()) > history_depth) {
      hist_lambda.pop_front();
      hist_error.pop_front();
    }
    if (hist_lambda.size() > 1) {
      const Eigen::VectorXd c = diis_coefficients(hist_error);
      if (c.allFinite()) {
        Eigen::VectorXd extrapolated = Eigen::VectorXd::Zero(b.size());
        for (std::size_t i = 0; i < hist_lambda.size(); ++i) {
          extrapolated += c(static_cast<int>(i)) * hist_lambda[i];
        }
        sol.lambda = extrapolated;
      }
    }

    r = b - matvec(sol.lambda);
    if (!r.allFinite()) {
      throw std::runtime_error("matvec produced a non-finite residual");
    }
  }
}

Eigen::VectorXd pseudoinverse_solve(const Eigen::MatrixXd& a,
                                    const Eigen::VectorXd& b, double cutoff) {
  return symmetric_pinv_solve(a, b, cutoff);
}

DensityPair unrelaxed_densities(const McVqeProblem& problem,
                                const FabricParameters& theta,
                                const Eigen::MatrixXd& eigenvectors,
                                int state) {
  const auto omega =
      rotated_reference(problem.references, eigenvectors, state);
  const auto psi = apply_fabric(omega, problem.layout, theta);
  return direct_densities(psi, problem.ints.n_orbitals());
}

DensityPair sa_density(const McVqeProblem& problem,
                       const FabricParameters& theta) {
  const int m = problem.ints.n_orbitals();
  DensityPair acc = DensityPair::zero(m, DensityFlavor::Unrelaxed);
  for (int s = 0; s < problem.n_states(); ++s) {
    if (problem.weights[s] == 0.0) continue;
    const auto gamma = entangled_reference(problem, theta, s);
    accumulate_density(acc, direct_densities(gamma, m), problem.weights[s]);
  }
  return acc;
}

DensityPair response_densities(const McVqeProblem& problem,
                               const FabricParameters& theta,
                               const Eigen::VectorXd& lambda) {
  const int n = problem.n_parameters();
  if (lambda.size() != n) throw std::invalid_argument("lambda size mismatch");
  const int m = problem.ints.n_orbitals();
  DensityPair out = DensityPair::zero(m, DensityFlavor::Response);
  std::vector<double> shifted(theta.size());
  for (int g = 0; g < n; ++g) {
    if (lambda(g) == 0.0) continue;
    const auto& rule = ShiftRule::for_gate(problem.layout.gates()[g].kind);
    for (int p = 0; p < rule.n_points(); ++p) {
      shifted = theta;
      shifted[g] += rule.shifts[p];
      accumulate_density(out, sa_density(problem, shifted),
                         lambda(g) * rule.weights[p]);
    }
  }
  return out;
}

DensityPair relaxed_densities(const DensityPair& unrelaxed,
                              const DensityPair& response) {
  if (unrelaxed.flavor != DensityFlavor::Unrelaxed ||
      response.flavor != DensityFlavor::Response) {
    throw std::invalid_argument("density flavor mismatch");
  }
  if (unrelaxed.m != response.m) {
    throw std::invalid_argument("density dimension mismatch");
  }
  DensityPair out = unrelaxed;
  out.flavor = DensityFlavor::Relaxed;
  accumulate_density(out, response, 1.0);
  return out;
}

double GradientRecord::orbit_derivative(const ElementId& id) const {
  if (id.kind == ElementId::Kind::OneBody) {
    return d_one_body[static_cast<std::size_t>(id.p) * m + id.q] *
           id.orbit_size();
  }
  const auto it = d_eri.find(id);
  if (it == d_eri.end()) throw std::out_of_range("unknown ERI orbit");
  return it->second;
}

GradientRecord matrix_element_gradient(const DensityPair& relaxed,
                                       const ActiveSpaceIntegrals& ints) {
  if (relaxed.flavor != DensityFlavor::Relaxed) {
    throw std::invalid_argument("matrix-element gradient needs relaxed input");
  }
  if (relaxed.m != ints.n_orbitals()) {
    throw std::invalid_argument("density dimension mismatch");
  }
  GradientRecord rec;
  rec.m = relaxed.m;
  rec.d_e_ext = 1.0;
  rec.d_one_body = relaxed.opdm;
  for (const auto& el : ints.canonical_elements()) {
    if (el.kind != ElementId::Kind::Eri) continue;
    rec.d_eri[el] = 0.5 * relaxed.tpdm_at(el.p, el.q, el.r, el.s) *
                    el.orbit_size();
  }
  return rec;
}

double max_orbit_deviation(const GradientRecord& a, const GradientRecord& b) {
  if (a.m != b.m) throw std::invalid_argument("record dimension mismatch");
  double dev = std::abs(a.d_e_ext - b.d_e_ext);
  for (int p = 0; p < a.m; ++p) {
    for (int q = p; q < a.m; ++q) {
      const auto id = ElementId::one_body(p, q);
      dev = std::max(dev,
                     std::abs(a.orbit_derivative(id) - b.orbit_derivative(id)));
    }
  }
  for (const auto& [id, da] : a.d_eri) {
    dev = std::max(dev, std::abs(da - b.orbit_derivative(id)));
  }
  return dev;
}

StateGradient compute_state_gradient(const McVqeProblem& problem,
                                     const McVqeSolution& solution, int state,
                                     const GradientOptions& options) {
  StateGradient out;
  const auto& theta = solution.opt.theta;
  const auto& v = solution.subspace.eigenvectors;
  out.rhs = state_gradient_rhs(problem, theta, v, state);

  switch (options.mode) {
    case HessianMode::Exact: {
      const Eigen::MatrixXd a = sa_hessian_exact(problem, theta);
      out.response.lambda = pseudoinverse_solve(a, out.rhs);
      out.response.iterations = 0;
      // A nonzero residual here means the RHS has weight in the Hessian's
      // null space (over-parameterized fabric); it is reported, not hidden.
      const double residual = inf_norm(out.rhs - a * out.response.lambda);
      out.response.residual_history.push_back(residual);
      out.response.converged = residual <= options.response_tol;
      break;
    }
    case HessianMode::MatvecExact: {
      const Eigen::MatrixXd a = sa_hessian_exact(problem, theta);
      const auto precond =
          condition_preconditioner(a.diagonal(), options.precond_floor);
      out.response = solve_response_diis(
          [&a](const Eigen::VectorXd& x) { return (a * x).eval(); }, out.rhs,
          precond, options.response_tol, options.max_iterations);
      break;
    }
    case HessianMode::MatvecFd: {
      const auto diag = sa_hessian_diagonal(problem, theta);
      const auto precond =
          condition_preconditioner(diag, options.precond_floor);
      out.response = solve_response_diis(
          [&](const Eigen::VectorXd& x) {
            if (x.norm() == 0.0) return Eigen::VectorXd::Zero(x.size()).eval();
            return sa_hessian_matvec_fd(problem, theta, x, options.n_fd,
                                        options.delta_fd);
          },
          out.rhs, precond, options.response_tol, options.max_iterations);
      break;
    }
  }

  out.unrelaxed = unrelaxed_densities(problem, theta, v, state);
  out.response_density = response_densities(problem, theta,
                                            out.response.lambda);
  out.relaxed = relaxed_densities(out.unrelaxed, out.response_density);
  out.record = matrix_element_gradient(out.relaxed, problem.ints);
  return out;
}

}  // namespace mcvqe
