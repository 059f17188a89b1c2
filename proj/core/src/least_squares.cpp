#include "least_squares.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "mechpf/errors.hpp"

namespace mechpf::detail {

namespace {

double half_squared_norm(const Eigen::VectorXd& r) { return 0.5 * r.squaredNorm(); }

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                      const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

/// Parameters sitting on a bound whose descent direction points outward.
std::vector<bool> pinned(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  std::vector<bool> out(static_cast<std::size_t>(x.size()));
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    out[static_cast<std::size_t>(j)] =
        (x(j) <= lower(j) && grad(j) > 0.0) || (x(j) >= upper(j) && grad(j) < 0.0);
  }
  return out;
}

bool gradient_converged(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r,
                        const std::vector<bool>& fixed, double tol) {
  const double rnorm = r.norm();
  if (rnorm == 0.0) return true;
  const Eigen::VectorXd g = jac.transpose() * r;
  for (Eigen::Index j = 0; j < jac.cols(); ++j) {
    if (fixed[static_cast<std::size_t>(j)]) continue;
    const double cnorm = jac.col(j).norm();
    if (cnorm == 0.0) continue;
    if (std::abs(g(j)) / (cnorm * rnorm) > tol) return false;
  }
  return true;
}

}  // namespace

Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const Eigen::VectorXd r0 = f(x);
  Eigen::MatrixXd jac(r0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    const bool up_ok = x(j) + h <= upper(j);
    const bool down_ok = x(j) - h >= lower(j);
    if (up_ok && down_ok) {
      xp(j) += h;
      xm(j) -= h;
      jac.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    } else if (up_ok) {
      xp(j) += h;
      jac.col(j) = (f(xp) - r0) / h;
    } else {
      xm(j) -= h;
      jac.col(j) = (r0 - f(xm)) / h;
    }
  }
  return jac;
}

LeastSquaresResult levenberg_marquardt(const ResidualFn& f, Eigen::VectorXd x0,
                                       const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                       const LeastSquaresOptions& options) {
  LeastSquaresResult out;
  out.x = clamp(x0, lower, upper);
  out.residual = f(out.x);
  if (!out.residual.allFinite()) {
    throw NumericalError("residual is not finite at the initial parameters");
  }
  double cost = half_squared_norm(out.residual);
  out.cost_history.push_back(cost);
  out.jacobian = numeric_jacobian(f, out.x, lower, upper);
  if (cost == 0.0) return out;

  Eigen::MatrixXd jtj = out.jacobian.transpose() * out.jacobian;
  double mu = 1e-3 * std::max(jtj.diagonal().maxCoeff(), 1e-300);
  double nu = 2.0;
  int stall = 0;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    out.iterations = iter;
    const Eigen::VectorXd grad = out.jacobian.transpose() * out.residual;
    const auto fixed = pinned(out.x, grad, lower, upper);
    if (gradient_converged(out.jacobian, out.residual, fixed, options.gradient_tolerance)) {
      out.status = LeastSquaresStatus::converged;
      return out;
    }
    Eigen::VectorXd diag = jtj.diagonal();
    const double floor = 1e-12 * std::max(diag.maxCoeff(), 1e-300);
    diag = diag.cwiseMax(floor);
    Eigen::MatrixXd damped = jtj;
    damped.diagonal() += mu * diag;
    Eigen::VectorXd rhs = -grad;
    for (Eigen::Index j = 0; j < x0.size(); ++j) {
      if (!fixed[static_cast<std::size_t>(j)]) continue;
      damped.row(j).setZero();
      damped.col(j).setZero();
      damped(j, j) = 1.0;
      rhs(j) = 0.0;
    }
    const Eigen::VectorXd step = damped.ldlt().solve(rhs);

    const Eigen::VectorXd candidate = clamp(out.x + step, lower, upper);
    const Eigen::VectorXd taken = candidate - out.x;
    if (taken.norm() <= options.step_tolerance * (out.x.norm() + options.step_tolerance)) {
      out.status = LeastSquaresStatus::converged;
      return out;
    }

    const Eigen::VectorXd r_new = f(candidate);
    const double cost_new = r_new.allFinite() ? half_squared_norm(r_new) : HUGE_VAL;
    const double predicted = -(grad.dot(taken) + 0.5 * taken.dot(jtj * taken));

    if (cost_new < cost) {
      const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : 0.0;
      const double relative_change = (cost - cost_new) / cost;
      out.x = candidate;
      out.residual = r_new;
      cost = cost_new;
      out.cost_history.push_back(cost);
      out.jacobian = numeric_jacobian(f, out.x, lower, upper);
      jtj = out.jacobian.transpose() * out.jacobian;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
      stall = relative_change < options.stall_tolerance ? stall + 1 : 0;
      if (cost == 0.0) {
        out.status = LeastSquaresStatus::converged;
        return out;
      }
    } else {
      mu *= nu;
      nu *= 2.0;
      ++stall;
    }
    if (stall >= options.stall_iterations || !std::isfinite(mu)) {
      out.status = LeastSquaresStatus::stalled;
      return out;
    }
  }
  const auto fixed = pinned(out.x, out.jacobian.transpose() * out.residual, lower, upper);
  out.status = gradient_converged(out.jacobian, out.residual, fixed, options.gradient_tolerance)
                   ? LeastSquaresStatus::converged
                   : LeastSquaresStatus::max_iterations;
  return out;
}

}  // namespace mechpf::detail
