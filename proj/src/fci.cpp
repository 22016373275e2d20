#include "mcvqe/fci.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "mcvqe/sim.hpp"

namespace mcvqe {

namespace {

int popcount_even(std::uint64_t b, int m) {
  int c = 0;
  for (int p = 0; p < m; ++p) c += (b >> (2 * p)) & 1;
  return c;
}

int popcount_odd(std::uint64_t b, int m) {
  int c = 0;
  for (int p = 0; p < m; ++p) c += (b >> (2 * p + 1)) & 1;
  return c;
}

// Slater-Condon diagonal element of a determinant.
double determinant_energy(const ActiveSpaceIntegrals& ints,
                          std::uint64_t det) {
  const int m = ints.n_orbitals();
  double e = ints.e_ext();
  std::vector<std::pair<int, int>> occ;  // (orbital, spin)
  for (int p = 0; p < m; ++p) {
    if ((det >> (2 * p)) & 1) occ.emplace_back(p, 0);
    if ((det >> (2 * p + 1)) & 1) occ.emplace_back(p, 1);
  }
  for (const auto& [p, sp] : occ) e += ints.one_body(p, p);
  for (const auto& [p, sp] : occ) {
    for (const auto& [q, sq] : occ) {
      e += 0.5 * ints.eri(p, p, q, q);
      if (sp == sq) e -= 0.5 * ints.eri(p, q, q, p);
    }
  }
  return e;
}

Statevector scatter(const SectorBasis& basis, const Eigen::VectorXd& v) {
  Statevector out(2 * basis.m);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out[basis.states[i]] = v(static_cast<Eigen::Index>(i));
  }
  return out;
}

Eigen::VectorXd gather(const SectorBasis& basis, const Statevector& s) {
  Eigen::VectorXd out(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = s[basis.states[i]].real();
  }
  return out;
}

Eigen::VectorXd sector_matvec(const ActiveSpaceIntegrals& ints,
                              const SectorBasis& basis,
                              const Eigen::VectorXd& v) {
  return gather(basis, apply_hamiltonian_direct(ints, scatter(basis, v)));
}

struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns, sector basis
};

EigenPairs dense_eigenpairs(const ActiveSpaceIntegrals& ints,
                            const SectorBasis& basis) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
    e(j) = 1.0;
    h.col(j) = sector_matvec(ints, basis, e);
  }
  h = 0.5 * (h + h.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

// Block Davidson with diagonal preconditioning for the lowest n_roots.
EigenPairs davidson_eigenpairs(const ActiveSpaceIntegrals& ints,
                               const SectorBasis& basis, int n_roots,
                               const FciOptions& options) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  if (n_roots > dim) throw std::invalid_argument("more roots than basis size");

  Eigen::VectorXd diag(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    diag(i) = determinant_energy(ints, basis.states[i]);
  }

  // Seed with unit vectors at the lowest-diagonal determinants.
  std::vector<Eigen::Index> order(dim);
  for (Eigen::Index i = 0; i < dim; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return diag(a) < diag(b); });
  const int block = std::min<Eigen::Index>(n_roots + 2, dim);
  const int max_subspace = std::min<Eigen::Index>(dim, 8 * block);

  std::vector<Eigen::VectorXd> vs, ws;
  for (int i = 0; i < block; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v(order[i]) = 1.0;
    vs.push_back(v);
  }

  Eigen::VectorXd ritz_values;
  Eigen::MatrixXd ritz_vectors;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    while (ws.size() < vs.size()) {
      ws.push_back(sector_matvec(ints, basis, vs[ws.size()]));
    }
    const int k = static_cast<int>(vs.size());
    Eigen::MatrixXd small(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) small(i, j) = vs[i].dot(ws[j]);
    small = 0.5 * (small + small.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);

    ritz_values = es.eigenvalues().head(n_roots);
    ritz_vectors.resize(dim, n_roots);
    Eigen::MatrixXd residuals(dim, n_roots);
    bool all_converged = true;
    for (int r = 0; r < n_roots; ++r) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
      Eigen::VectorXd ax = Eigen::VectorXd::Zero(dim);
      for (int i = 0; i < k; ++i) {
        x += es.eigenvectors()(i, r) * vs[i];
        ax += es.eigenvectors()(i, r) * ws[i];
      }
      ritz_vectors.col(r) = x;
      residuals.col(r) = ax - ritz_values(r) * x;
      if (residuals.col(r).norm() > options.residual_tol) {
        all_converged = false;
      }
    }
    if (all_converged) return {ritz_values, ritz_vectors};

    if (k + n_roots > max_subspace) {
      // Restart from the current Ritz vectors.
      vs.clear();
      ws.clear();
      for (int r = 0; r < n_roots; ++r) vs.push_back(ritz_vectors.col(r));
      for (auto& v : vs) {
        for (std::size_t j = 0; j < vs.size() && &vs[j] != &v; ++j) {
          v -= vs[j].dot(v) * vs[j];
        }
        v.normalize();
      }
      continue;
    }

    bool expanded = false;
    for (int r = 0; r < n_roots; ++r) {
      if (residuals.col(r).norm() <= options.residual_tol) continue;
      Eigen::VectorXd d(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        double denom = ritz_values(r) - diag(i);
        if (std::abs(denom) < 1e-8) denom = denom < 0 ? -1e-8 : 1e-8;
        d(i) = residuals(i, r) / denom;
      }
      // Orthogonalize twice against the current subspace.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& v : vs) d -= v.dot(d) * v;
      }
      const double nrm = d.norm();
      if (nrm > 1e-10) {
        d /= nrm;
        vs.push_back(d);
        expanded = true;
      }
    }
    if (!expanded) {
      // Subspace is numerically exhausted; accept the current Ritz pairs.
      return {ritz_values, ritz_vectors};
    }
  }
  throw std::runtime_error("Davidson iteration did not converge");
}

}  // namespace

SectorBasis SectorBasis::build(int m, const SectorSpec& sector) {
  sector.validate(m);
  SectorBasis basis;
  basis.m = m;
  basis.n_alpha = sector.n_alpha;
  basis.n_beta = sector.n_beta;
  const std::uint64_t dim = std::uint64_t{1} << (2 * m);
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (popcount_even(b, m) == sector.n_alpha &&
        popcount_odd(b, m) == sector.n_beta) {
      basis.states.push_back(b);
    }
  }
  return basis;
}

int SectorBasis::index_of(std::uint64_t det) const {
  const auto it = std::lower_bound(states.begin(), states.end(), det);
  if (it == states.end() || *it != det) return -1;
  return static_cast<int>(it - states.begin());
}

namespace {

// S^2 |psi> = (S- S+ + Sz + Sz^2) |psi> via ladder operators.
Statevector apply_s2_direct(const Statevector& state, int m) {
  Statevector splus(state.n_qubits());
  for (int p = 0; p < m; ++p) {
    Statevector t = state;
    apply_ladder(t, m, 1, p, false);
    apply_ladder(t, m, 0, p, true);
    splus += t;
  }
  Statevector total(state.n_qubits());
  for (int p = 0; p < m; ++p) {
    Statevector t = splus;
    apply_ladder(t, m, 0, p, false);
    apply_ladder(t, m, 1, p, true);
    total += t;
  }
  for (std::uint64_t b = 0; b < state.dim(); ++b) {
    const double ms = 0.5 * (popcount_even(b, m) - popcount_odd(b, m));
    total[b] += (ms + ms * ms) * state[b];
  }
  return total;
}

}  // namespace

double s2_expectation_direct(const Statevector& state, int m) {
  return inner(state, apply_s2_direct(state, m)).real();
}

FciResult fci_solve(const ActiveSpaceIntegrals& ints, const SectorSpec& sector,
                    int n_states, const FciOptions& options) {
  const int m = ints.n_orbitals();
  if (m > 8) throw std::invalid_argument("sector too large (M <= 8 supported)");
  if (n_states < 1) throw std::invalid_argument("need at least one state");
  const SectorBasis basis = SectorBasis::build(m, sector);
  if (basis.size() == 0) throw std::invalid_argument("empty sector");
  if (static_cast<std::size_t>(n_states) > basis.size()) {
    throw std::invalid_argument("more states than sector dimension");
  }

  const double s2_target = sector.s2_eigenvalue();
  const bool dense = static_cast<int>(basis.size()) <= options.dense_threshold;

  int want = n_states + 4;
  for (;;) {
    want = std::min<int>(want, static_cast<int>(basis.size()));
    EigenPairs pairs = dense ? dense_eigenpairs(ints, basis)
                             : davidson_eigenpairs(ints, basis, want, options);

    // Rotate within degenerate clusters so S^2 is diagonal there, then
    // filter on the sector's spin eigenvalue.
    const int found = static_cast<int>(pairs.values.size());
    std::vector<int> cluster_start;
    for (int i = 0; i < found; ++i) {
      if (i == 0 || pairs.values(i) - pairs.values(i - 1) > 1e-9) {
        cluster_start.push_back(i);
      }
    }
    cluster_start.push_back(found);

    FciResult result;
    for (std::size_t c = 0; c + 1 < cluster_start.size(); ++c) {
      const int begin = cluster_start[c];
      const int size = cluster_start[c + 1] - begin;
      Eigen::MatrixXd vecs = pairs.vectors.middleCols(begin, size);
      if (size > 1) {
        // Diagonalize S^2 within the degenerate cluster so spin-pure
        // combinations can be filtered even under accidental degeneracy.
        Eigen::MatrixXd s2_block(size, size);
        std::vector<Statevector> embedded;
        for (int i = 0; i < size; ++i) {
          embedded.push_back(scatter(basis, vecs.col(i)));
        }
        for (int i = 0; i < size; ++i) {
          const Statevector applied = apply_s2_direct(embedded[i], m);
          for (int j = 0; j < size; ++j) {
            s2_block(j, i) = inner(embedded[j], applied).real();
          }
        }
        s2_block = 0.5 * (s2_block + s2_block.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> se(s2_block);
        vecs = (vecs * se.eigenvectors()).eval();
      }
      for (int i = 0; i < size; ++i) {
        const Statevector candidate = scatter(basis, vecs.col(i));
        const double s2 = s2_expectation_direct(candidate, m);
        if (std::abs(s2 - s2_target) <= options.spin_tol) {
          result.energies.push_back(pairs.values(begin + i));
          result.states.push_back(candidate);
        }
        if (static_cast<int>(result.energies.size()) == n_states) break;
      }
      if (static_cast<int>(result.energies.size()) == n_states) break;
    }

    if (static_cast<int>(result.energies.size()) == n_states) {
      for (auto& s : result.states) s.normalize();
      for (const auto& s : result.states) {
        result.densities.push_back(direct_densities(s, m));
      }
      return result;
    }
    if (want == static_cast<int>(basis.size())) {
      throw std::runtime_error(
          "fewer spin-pure eigenstates than requested in this sector");
    }
    if (dense) {
      // Dense path already saw the whole spectrum.
      throw std::runtime_error(
          "fewer spin-pure eigenstates than requested in this sector");
    }
    want += 4;
  }
}

GradientRecord fd_total_gradient(const McVqeProblem& problem, int state,
                                 const McVqeSolution& base,
                                 const FdGradientOptions& options) {
  const int m = problem.ints.n_orbitals();
  if (state < 0 || state >= problem.n_states()) {
    throw std::out_of_range("state index out of range");
  }
  if (options.step <= 0.0) throw std::invalid_argument("step must be positive");

  // The base-point Hessian serves as the quasi-Newton model for every
  // warm-started re-optimization; displacements are tiny.
  OptimizeOptions reopt;
  reopt.gtol = options.gtol;
  reopt.max_iterations = options.max_iterations;
  reopt.polish_hessian = sa_hessian_exact(problem, base.opt.theta);

  const auto energy_at = [&](const ActiveSpaceIntegrals& displaced) {
    McVqeProblem p = problem;
    p.ints = displaced;
    const auto opt = sa_vqe_optimize(p, base.opt.theta, reopt);
    if (!opt.converged) {
      throw std::runtime_error(
          "optimizer failed at a displaced integral point (|grad| = " +
          std::to_string(opt.grad_norm) + ")");
    }
    const auto sub = diagonalize_subspace(subspace_hamiltonian(p, opt.theta));
    return sub.energies(state);
  };

  GradientRecord rec;
  rec.m = m;
  rec.d_one_body.assign(static_cast<std::size_t>(m) * m, 0.0);
  const double h = options.step;

  for (const auto& el : problem.ints.canonical_elements()) {
    const double ep = energy_at(problem.ints.perturbed(el, h));
    const double em = energy_at(problem.ints.perturbed(el, -h));
    const double deriv = (ep - em) / (2.0 * h);
    if (el.kind == ElementId::Kind::OneBody) {
      const double per_element = deriv / el.orbit_size();
      rec.d_one_body[static_cast<std::size_t>(el.p) * m + el.q] = per_element;
      rec.d_one_body[static_cast<std::size_t>(el.q) * m + el.p] = per_element;
    } else {
      rec.d_eri[el] = deriv;
    }
  }

  ActiveSpaceIntegrals up = problem.ints;
  up.set_e_ext(problem.ints.e_ext() + h);
  ActiveSpaceIntegrals down = problem.ints;
  down.set_e_ext(problem.ints.e_ext() - h);
  rec.d_e_ext = (energy_at(up) - energy_at(down)) / (2.0 * h);
  return rec;
}

}  // namespace mcvqe
