#pragma once

// Bounded Levenberg-Marquardt on a real residual vector. Internal to the
// fitting module.

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace mechpf::detail {

struct LeastSquaresOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;  ///< max cosine between residual and free Jacobian columns
  double step_tolerance = 1e-12;      ///< relative parameter step
  double stall_tolerance = 1e-12;     ///< relative cost change counted as no progress
  int stall_iterations = 10;
};

enum class LeastSquaresStatus { converged, max_iterations, stalled };

struct LeastSquaresResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;  ///< at x
  LeastSquaresStatus status = LeastSquaresStatus::converged;
  int iterations = 0;
  std::vector<double> cost_history;  ///< 0.5*|r|^2 at the start and after each accepted step
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central-difference Jacobian with per-parameter step 1e-6*max(1, |x_j|),
/// reflected inward at the bounds.
Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

/// Throws NumericalError when the residual at x0 is not finite.
LeastSquaresResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd x0,
                                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                       const LeastSquaresOptions& options);

}  // namespace mechpf::detail
