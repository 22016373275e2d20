#include "mcvqe/mcvqe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "mcvqe/linalg.hpp"
#include "mcvqe/shift_rules.hpp"

namespace mcvqe {

namespace {

ThetaFunction sa_energy_function(const McVqeProblem& problem) {
  return [&problem](const std::vector<double>& theta) {
    return sa_energy(problem, theta);
  };
}

}  // namespace

McVqeProblem McVqeProblem::build(ActiveSpaceIntegrals ints, SectorSpec sector,
                                 FabricLayout layout, int n_states,
                                 std::vector<double> weights) {
  sector.validate(ints.n_orbitals());
  if (layout.n_orbitals() != ints.n_orbitals()) {
    throw std::invalid_argument("fabric layout does not match orbital count");
  }
  McVqeProblem p;
  p.reference_specs = select_references(ints, sector, n_states);
  if (weights.empty()) {
    weights.assign(p.reference_specs.size(), 1.0 / p.reference_specs.size());
  }
  if (weights.size() != p.reference_specs.size()) {
    throw std::invalid_argument("weight count does not match state count");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("negative weight");
    if (i > 0 && weights[i] > weights[i - 1] + 1e-15) {
      throw std::invalid_argument("weights must be non-increasing");
    }
    total += weights[i];
  }
  if (total <= 0.0) throw std::invalid_argument("weights sum to zero");
  for (auto& w : weights) w /= total;
  p.weights = std::move(weights);
  for (const auto& spec : p.reference_specs) {
    p.references.push_back(prepare_csf(spec, sector, ints.n_orbitals()));
  }
  p.ints = std::move(ints);
  p.sector = sector;
  p.layout = layout;
  return p;
}

std::vector<CsfSpec> select_references(const ActiveSpaceIntegrals& ints,
                                       const SectorSpec& sector,
                                       int n_states) {
  const int m = ints.n_orbitals();
  sector.validate(m);
  const int nocc = sector.n_alpha;

  std::vector<CsfSpec> pool;
  pool.push_back(CsfSpec::closed_shell());
  for (int i = 0; i < nocc; ++i)
    for (int a = nocc; a < m; ++a) pool.push_back(CsfSpec::single(i, a));
  for (int i = 0; i < nocc; ++i)
    for (int a = nocc; a < m; ++a) pool.push_back(CsfSpec::double_exc(i, a));

  if (n_states < 1 || n_states > static_cast<int>(pool.size())) {
    throw std::invalid_argument("requested more states than the CSF pool");
  }

  std::vector<std::pair<double, CsfSpec>> ranked;
  for (const auto& spec : pool) {
    const auto phi = prepare_csf(spec, sector, m);
    ranked.emplace_back(hamiltonian_expectation_direct(ints, phi), spec);
  }
  // Stable sort keeps the (kind, i, a) pool order on exact ties.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     return a.first < b.first;
                   });
  std::vector<CsfSpec> out;
  for (int s = 0; s < n_states; ++s) out.push_back(ranked[s].second);
  return out;
}

Statevector entangled_reference(const McVqeProblem& problem,
                                const FabricParameters& theta, int state) {
  return apply_fabric(problem.references.at(state), problem.layout, theta);
}

double sa_energy(const McVqeProblem& problem, const FabricParameters& theta) {
  double e = 0.0;
  for (int s = 0; s < problem.n_states(); ++s) {
    if (problem.weights[s] == 0.0) continue;
    const auto gamma = entangled_reference(problem, theta, s);
    e += problem.weights[s] *
         hamiltonian_expectation_direct(problem.ints, gamma);
  }
  return e;
}

Eigen::VectorXd sa_energy_gradient(const McVqeProblem& problem,
                                   const FabricParameters& theta) {
  return shift_gradient_all(sa_energy_function(problem), theta,
                            problem.layout);
}

OptimizeResult sa_vqe_optimize(const McVqeProblem& problem,
                               const FabricParameters& theta_init,
                               const OptimizeOptions& options) {
  const int n = problem.n_parameters();
  if (static_cast<int>(theta_init.size()) != n) {
    throw std::invalid_argument("theta_init does not match layout");
  }
  for (double t : theta_init) {
    if (!std::isfinite(t)) throw std::invalid_argument("non-finite theta_init");
  }

  OptimizeResult result;
  result.theta = theta_init;

  std::vector<double> theta = theta_init;
  Eigen::VectorXd g = sa_energy_gradient(problem, theta);
  double energy = sa_energy(problem, theta);
  result.energy_trace.push_back(energy);
  result.gnorm_trace.push_back(inf_norm(g));

  // Phase 1: L-BFGS with backtracking Armijo line search, down to the point
  // where energy-difference line searches stop resolving; Newton polishing
  // finishes from there.
  const int history = 8;
  std::vector<Eigen::VectorXd> s_hist, y_hist;
  const double lbfgs_floor = std::max(options.gtol, 1e-6);
  // Warm restarts near a known optimum go straight to Newton polishing.
  const bool skip_lbfgs = options.polish_hessian && inf_norm(g) < 1e-3;
  int iter = 0;
  while (!skip_lbfgs && iter < options.max_iterations &&
         inf_norm(g) > lbfgs_floor) {
    ++iter;
    // Two-loop recursion.
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
      alpha[i] = rho * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma = s_hist.back().dot(y_hist.back()) /
                           y_hist.back().dot(y_hist.back());
      q *= gamma;
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double rho = 1.0 / y_hist[i].dot(s_hist[i]);
      const double beta = rho * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd direction = -q;
    double dg = direction.dot(g);
    if (dg >= 0.0) {
      direction = -g;
      dg = -g.squaredNorm();
    }

    double t = 1.0;
    double new_energy = energy;
    std::vector<double> trial(theta.size());
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      for (int k = 0; k < n; ++k) trial[k] = theta[k] + t * direction(k);
      new_energy = sa_energy(problem, trial);
      if (new_energy <= energy + 1e-4 * t * dg) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // step below resolution; hand over to polishing
    if (t * inf_norm(direction) < 1e-13) break;  // stagnated

    const Eigen::VectorXd g_new = sa_energy_gradient(problem, trial);
    Eigen::VectorXd step(n), dgrad(n);
    for (int k = 0; k < n; ++k) step(k) = trial[k] - theta[k];
    dgrad = g_new - g;
    if (step.dot(dgrad) > 1e-14) {
      s_hist.push_back(step);
      y_hist.push_back(dgrad);
      if (static_cast<int>(s_hist.size()) > history) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
      }
    }
    theta = trial;
    g = g_new;
    energy = new_energy;
    result.energy_trace.push_back(energy);
    result.gnorm_trace.push_back(inf_norm(g));
  }

  // Phase 2: Newton polish; line searches on energy values cannot resolve
  // decrements near machine precision, so steps are accepted on
  // gradient-norm decrease instead. Starts from the frozen Hessian when one
  // was supplied and falls back to the exact one if that stalls.
  Eigen::MatrixXd hess;
  bool have_hessian = false;
  bool hessian_fresh = false;
  if (options.polish_hessian && options.polish_hessian->rows() == n) {
    hess = *options.polish_hessian;
    have_hessian = true;
  }
  int polish = 0;
  while (inf_norm(g) > options.gtol && polish < 40) {
    ++polish;
    ++iter;
    if (!have_hessian) {
      hess = shift_hessian(sa_energy_function(problem), theta, problem.layout);
      have_hessian = true;
      hessian_fresh = true;
    }
    Eigen::VectorXd step = symmetric_pinv_solve(hess, -g, 1e-10);
    if (inf_norm(step) == 0.0) break;
    bool improved = false;
    std::vector<double> trial(theta.size());
    for (int shrink = 0; shrink < 8; ++shrink) {
      for (int k = 0; k < n; ++k) trial[k] = theta[k] + step(k);
      const Eigen::VectorXd g_new = sa_energy_gradient(problem, trial);
      if (inf_norm(g_new) < inf_norm(g)) {
        theta = trial;
        g = g_new;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      if (hessian_fresh) break;
      have_hessian = false;  // retry with the exact Hessian
      continue;
    }
    energy = sa_energy(problem, theta);
    result.energy_trace.push_back(energy);
    result.gnorm_trace.push_back(inf_norm(g));
  }

  result.theta = theta;
  result.iterations = iter;
  result.grad_norm = inf_norm(g);
  result.converged = result.grad_norm <= options.gtol;
  return result;
}

Eigen::MatrixXd subspace_hamiltonian(const McVqeProblem& problem,
                                     const FabricParameters& theta) {
  const int ns = problem.n_states();
  Eigen::MatrixXd h(ns, ns);
  std::vector<Statevector> entangled;
  for (int s = 0; s < ns; ++s) {
    entangled.push_back(entangled_reference(problem, theta, s));
    h(s, s) = hamiltonian_expectation_direct(problem.ints, entangled[s]);
  }
  for (int s = 0; s < ns; ++s) {
    for (int t = s + 1; t < ns; ++t) {
      const auto chi_plus =
          prepare_interference(problem.references[s], problem.references[t], 1);
      const auto chi_minus = prepare_interference(problem.references[s],
                                                  problem.references[t], -1);
      const double ep = hamiltonian_expectation_direct(
          problem.ints, apply_fabric(chi_plus, problem.layout, theta));
      const double em = hamiltonian_expectation_direct(
          problem.ints, apply_fabric(chi_minus, problem.layout, theta));
      h(s, t) = 0.5 * (ep - em);
      h(t, s) = h(s, t);
    }
  }
  return h;
}

SubspaceResult diagonalize_subspace(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("subspace not square");
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("subspace Hamiltonian not symmetric");
  }
  SubspaceResult out;
  out.hamiltonian = h;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  out.energies = es.eigenvalues();  // ascending
  out.eigenvectors = es.eigenvectors();
  // Deterministic sign: largest-magnitude component positive.
  for (int c = 0; c < out.eigenvectors.cols(); ++c) {
    int arg = 0;
    for (int r = 1; r < out.eigenvectors.rows(); ++r) {
      if (std::abs(out.eigenvectors(r, c)) >
          std::abs(out.eigenvectors(arg, c))) {
        arg = r;
      }
    }
    if (out.eigenvectors(arg, c) < 0.0) out.eigenvectors.col(c) *= -1.0;
  }
  out.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < out.energies.size(); ++i) {
    out.min_gap = std::min(out.min_gap, out.energies(i + 1) - out.energies(i));
  }
  out.conditioning_warning =
      out.energies.size() > 1 && out.min_gap < 1e-8;
  return out;
}

Statevector rotated_reference(const std::vector<Statevector>& references,
                              const Eigen::MatrixXd& eigenvectors, int state) {
  if (references.empty()) throw std::invalid_argument("no references");
  if (state < 0 || state >= eigenvectors.cols()) {
    throw std::out_of_range("state index out of range");
  }
  Statevector omega(references[0].n_qubits());
  for (std::size_t r = 0; r < references.size(); ++r) {
    omega.axpy(eigenvectors(static_cast<int>(r), state), references[r]);
  }
  return omega;
}

double state_energy(const McVqeProblem& problem, const FabricParameters& theta,
                    const Eigen::MatrixXd& eigenvectors, int state) {
  const auto omega = rotated_reference(problem.references, eigenvectors, state);
  return hamiltonian_expectation_direct(
      problem.ints, apply_fabric(omega, problem.layout, theta));
}

McVqeSolution solve_mcvqe(const McVqeProblem& problem,
                          const FabricParameters& theta_init,
                          const OptimizeOptions& options) {
  McVqeSolution sol;
  sol.opt = sa_vqe_optimize(problem, theta_init, options);
  if (!sol.opt.converged) {
    throw std::runtime_error(
        "SA-VQE optimization did not reach gtol; final |grad| = " +
        std::to_string(sol.opt.grad_norm));
  }
  sol.subspace = diagonalize_subspace(subspace_hamiltonian(problem,
                                                           sol.opt.theta));
  return sol;
}

FabricParameters initial_parameters(const FabricLayout& layout,
                                    std::uint64_t seed, double jitter) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  FabricParameters theta(layout.n_parameters(), 0.0);
  for (auto& t : theta) t = jitter * unif(rng);
  return theta;
}

}  // namespace mcvqe
