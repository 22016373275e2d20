#include "mcvqe/shift_rules.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mcvqe {

namespace {

// Tomography of a single gate on a fixed synthetic problem: a seeded random
// 4-qubit state and observable diag +/- structure. Used only to validate the
// stencils at startup.
double synthetic_tomography(GateKind kind, double theta) {
  std::mt19937_64 rng(kind == GateKind::PairExchange ? 321 : 654);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Statevector psi(4);
  for (std::size_t i = 0; i < psi.dim(); ++i) psi[i] = {gauss(rng), gauss(rng)};
  psi.normalize();
  std::vector<double> obs(16);
  for (auto& o : obs) o = gauss(rng);

  Statevector evolved = psi;
  apply_gate_inplace(evolved, {kind, 0}, theta);
  double acc = 0.0;
  for (std::size_t i = 0; i < 16; ++i) acc += obs[i] * std::norm(evolved[i]);
  return acc;
}

void validate_rule(const ShiftRule& rule) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double theta = unif(rng);
    double analytic = 0.0;
    for (int p = 0; p < rule.n_points(); ++p) {
      analytic += rule.weights[p] *
                  synthetic_tomography(rule.kind, theta + rule.shifts[p]);
    }
    // Five-point finite difference, O(h^4) truncation.
    const double h = 1e-4;
    const auto f = [&](double t) { return synthetic_tomography(rule.kind, t); };
    const double fd = (-f(theta + 2 * h) + 8 * f(theta + h) -
                       8 * f(theta - h) + f(theta - 2 * h)) /
                      (12 * h);
    if (std::abs(analytic - fd) > 1e-10) {
      throw std::logic_error("parameter shift rule failed validation");
    }
  }
}

}  // namespace

ShiftRule ShiftRule::for_frequencies(GateKind kind, double omega0, int r) {
  if (r < 1 || omega0 <= 0.0) throw std::invalid_argument("bad frequency set");
  ShiftRule rule;
  rule.kind = kind;
  // Positive shift points t_mu = (2 mu - 1) pi / (2 r omega0); weights from
  // sum_mu 2 v_mu sin(omega_k t_mu) = omega_k for each frequency.
  Eigen::MatrixXd a(r, r);
  Eigen::VectorXd b(r);
  std::vector<double> t(r);
  for (int mu = 0; mu < r; ++mu) {
    t[mu] = (2.0 * mu + 1.0) * std::numbers::pi / (2.0 * r * omega0);
  }
  for (int k = 0; k < r; ++k) {
    const double omega = omega0 * (k + 1);
    for (int mu = 0; mu < r; ++mu) a(k, mu) = 2.0 * std::sin(omega * t[mu]);
    b(k) = omega;
  }
  const Eigen::VectorXd v = a.fullPivLu().solve(b);
  if ((a * v - b).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::logic_error("shift rule weights are inconsistent");
  }
  for (int mu = 0; mu < r; ++mu) {
    rule.shifts.push_back(t[mu]);
    rule.weights.push_back(v(mu));
    rule.shifts.push_back(-t[mu]);
    rule.weights.push_back(-v(mu));
  }
  return rule;
}

const ShiftRule& ShiftRule::for_gate(GateKind kind) {
  static std::once_flag once;
  static ShiftRule px, orot;
  std::call_once(once, [] {
    // Pair exchange: frequencies {1, 2}; orbital rotation: half-angle Givens
    // in both spin sectors, frequencies {1/2, 1, 3/2, 2}.
    px = for_frequencies(GateKind::PairExchange, 1.0, 2);
    orot = for_frequencies(GateKind::OrbitalRotation, 0.5, 4);
    validate_rule(px);
    validate_rule(orot);
  });
  return kind == GateKind::PairExchange ? px : orot;
}

double shift_gradient(const ThetaFunction& f, const std::vector<double>& theta,
                      int g, const ShiftRule& rule) {
  if (g < 0 || g >= static_cast<int>(theta.size())) {
    throw std::out_of_range("parameter index out of range");
  }
  std::vector<double> shifted = theta;
  double acc = 0.0;
  for (int p = 0; p < rule.n_points(); ++p) {
    shifted[g] = theta[g] + rule.shifts[p];
    acc += rule.weights[p] * f(shifted);
  }
  return acc;
}

Eigen::VectorXd shift_gradient_all(const ThetaFunction& f,
                                   const std::vector<double>& theta,
                                   const FabricLayout& layout) {
  const int n = layout.n_parameters();
  if (static_cast<int>(theta.size()) != n) {
    throw std::invalid_argument("theta does not match layout");
  }
  Eigen::VectorXd grad(n);
  for (int g = 0; g < n; ++g) {
    grad(g) = shift_gradient(f, theta, g,
                             ShiftRule::for_gate(layout.gates()[g].kind));
  }
  return grad;
}

Eigen::MatrixXd shift_hessian(const ThetaFunction& f,
                              const std::vector<double>& theta,
                              const FabricLayout& layout) {
  const int n = layout.n_parameters();
  if (static_cast<int>(theta.size()) != n) {
    throw std::invalid_argument("theta does not match layout");
  }
  Eigen::MatrixXd hess(n, n);
  std::vector<double> shifted = theta;
  for (int g = 0; g < n; ++g) {
    const auto& rg = ShiftRule::for_gate(layout.gates()[g].kind);
    for (int h = g; h < n; ++h) {
      const auto& rh = ShiftRule::for_gate(layout.gates()[h].kind);
      double acc = 0.0;
      for (int p = 0; p < rg.n_points(); ++p) {
        for (int q = 0; q < rh.n_points(); ++q) {
          shifted = theta;
          shifted[g] += rg.shifts[p];
          shifted[h] += rh.shifts[q];
          acc += rg.weights[p] * rh.weights[q] * f(shifted);
        }
      }
      hess(g, h) = acc;
      hess(h, g) = acc;
    }
  }
  // Exact symmetry after the averaging pass.
  hess = 0.5 * (hess + hess.transpose()).eval();
  return hess;
}

Eigen::VectorXd shift_hessian_diagonal(const ThetaFunction& f,
                                       const std::vector<double>& theta,
                                       const FabricLayout& layout) {
  const int n = layout.n_parameters();
  Eigen::VectorXd diag(n);
  std::vector<double> shifted = theta;
  for (int g = 0; g < n; ++g) {
    const auto& rule = ShiftRule::for_gate(layout.gates()[g].kind);
    double acc = 0.0;
    for (int p = 0; p < rule.n_points(); ++p) {
      for (int q = 0; q < rule.n_points(); ++q) {
        shifted = theta;
        shifted[g] += rule.shifts[p] + rule.shifts[q];
        acc += rule.weights[p] * rule.weights[q] * f(shifted);
      }
    }
    diag(g) = acc;
  }
  return diag;
}

FdStencil FdStencil::central(int n_points, double step) {
  if (n_points < 2 || n_points % 2 != 0) {
    throw std::invalid_argument("stencil size must be a positive even count");
  }
  if (step <= 0.0) throw std::invalid_argument("stencil step must be positive");
  const int half = n_points / 2;
  // Antisymmetric weights; impose exactness on odd monomials t^1, t^3, ...
  Eigen::MatrixXd a(half, half);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(half);
  for (int row = 0; row < half; ++row) {
    const int power = 2 * row + 1;
    for (int k = 0; k < half; ++k) {
      a(row, k) = 2.0 * std::pow((k + 1) * step, power);
    }
  }
  b(0) = 1.0;
  const Eigen::VectorXd w = a.fullPivLu().solve(b);
  FdStencil st;
  st.n_points = n_points;
  st.step = step;
  for (int k = 0; k < half; ++k) {
    st.offsets.push_back((k + 1) * step);
    st.weights.push_back(w(k));
    st.offsets.push_back(-(k + 1) * step);
    st.weights.push_back(-w(k));
  }
  return st;
}

}  // namespace mcvqe
