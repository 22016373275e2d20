#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "mcvqe/sim.hpp"

namespace mcvqe {

using ThetaFunction = std::function<double(const std::vector<double>&)>;

/// Exact first-derivative stencil for a gate whose tomography is a
/// trigonometric polynomial with equidistant frequencies:
///   df/dtheta = sum_P v_P f(theta + t_P).
/// A pair-exchange gate carries two frequencies (4 points), a spin-adapted
/// orbital rotation four (8 points). Rules are validated once per gate kind
/// against a dense high-order finite difference of a synthetic tomography.
struct ShiftRule {
  GateKind kind;
  std::vector<double> shifts;
  std::vector<double> weights;

  int n_points() const { return static_cast<int>(shifts.size()); }

  /// Cached, startup-validated rule for the gate kind.
  static const ShiftRule& for_gate(GateKind kind);

  /// Stencil for equidistant frequencies w0 * {1, ..., r}.
  static ShiftRule for_frequencies(GateKind kind, double omega0, int r);
};

/// Exact single-parameter derivative of f at theta along parameter g.
double shift_gradient(const ThetaFunction& f, const std::vector<double>& theta,
                      int g, const ShiftRule& rule);

/// Gradient over all parameters of a fabric layout (per-gate rules).
Eigen::VectorXd shift_gradient_all(const ThetaFunction& f,
                                   const std::vector<double>& theta,
                                   const FabricLayout& layout);

/// Symmetric second-derivative matrix via a double application of the
/// parameter shift rule.
Eigen::MatrixXd shift_hessian(const ThetaFunction& f,
                              const std::vector<double>& theta,
                              const FabricLayout& layout);

/// Diagonal of the parameter Hessian in a single linear-cost pass.
Eigen::VectorXd shift_hessian_diagonal(const ThetaFunction& f,
                                       const std::vector<double>& theta,
                                       const FabricLayout& layout);

/// Symmetric central finite-difference stencil for a first derivative:
/// offsets +/- k*step, antisymmetric weights, exact on polynomials of
/// degree <= n_points + 1.
struct FdStencil {
  int n_points;
  double step;
  std::vector<double> offsets;
  std::vector<double> weights;

  static FdStencil central(int n_points, double step);
};

}  // namespace mcvqe
