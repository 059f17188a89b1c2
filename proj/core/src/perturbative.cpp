#include "mechpf/perturbative.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>

#include "mechpf/errors.hpp"

namespace mechpf {

namespace {

/// Secant iteration for a real root of a real-valued function near `guess`.
double refine_root(const std::function<double(double)>& f, double guess, const char* what) {
  double x0 = guess;
  double x1 = guess * (1.0 + 1e-4);
  double f0 = f(x0);
  double f1 = f(x1);
  for (int iter = 0; iter < 200; ++iter) {
    if (f1 == 0.0) return x1;
    if (f1 == f0) break;
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!std::isfinite(x2) || x2 <= 0.0) break;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f(x1);
    if (std::abs(x1 - x0) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x1)) {
      return x1;
    }
  }
  std::ostringstream msg;
  msg << "root refinement for the " << what << " did not converge near " << guess << " rad/s";
  throw NumericalError(msg.str());
}

Complex richardson(const std::function<Complex(double)>& f, double x, double h) {
  const auto central = [&](double step) { return (f(x + step) - f(x - step)) / (2.0 * step); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

}  // namespace

Complex derivative(const std::function<Complex(double)>& f, double x, double rel_tol) {
  const double base = 1e-6 * std::max(std::abs(x), 1.0);
  double best_change = std::numeric_limits<double>::infinity();
  // Initial step first, then progressively coarser and finer ones.
  for (const double scale : {1.0, 10.0, 0.1, 100.0, 0.01}) {
    const double h = base * scale;
    const Complex coarse = richardson(f, x, h);
    const Complex fine = richardson(f, x, 0.5 * h);
    const double change = std::abs(fine - coarse);
    if (change <= rel_tol * std::abs(fine)) return fine;
    best_change = std::min(best_change, change / std::abs(fine));
  }
  std::ostringstream msg;
  msg << "finite-difference derivative at " << x
      << " did not converge; best relative step change " << best_change;
  throw NumericalError(msg.str());
}

PerturbativeShifts perturbative_shifts(const PerturbativeInputs& in, double omega_r_guess,
                                       double omega_q_guess) {
  if (!(in.c1 >= 0.0) || !(in.c2 >= 0.0)) {
    throw DomainError("coupling capacitances must be non-negative");
  }
  if (!(omega_r_guess > 0.0) || !(omega_q_guess > 0.0)) {
    throw DomainError("mode frequency guesses must be positive");
  }
  const auto det_ybar = [&](double w) -> Complex { return in.ybar(w).determinant(); };
  const auto yq = [&](double w) -> Complex { return 1.0 / in.zq(w); };

  PerturbativeShifts out;
  out.omega_r = refine_root([&](double w) { return det_ybar(w).real(); }, omega_r_guess,
                            "resonator mode");
  out.omega_q = refine_root([&](double w) { return yq(w).imag(); }, omega_q_guess, "qubit pole");

  const double wr = out.omega_r;
  const double wq = out.omega_q;
  const double delta = wq - wr;
  if (std::abs(delta) <= 1e-12 * wr) {
    throw DomainError("qubit and resonator modes coincide; perturbative shifts are undefined");
  }

  out.lambda = derivative(det_ybar, wr);
  out.dyq = derivative(yq, wq);

  const Eigen::Matrix2cd y_r = in.ybar(wr);
  const Eigen::Matrix2cd y_q = in.ybar(wq);
  const double scale = std::abs(y_r(0, 0)) * std::abs(y_r(1, 1)) + std::norm(y_r(0, 1));
  if (std::abs(out.lambda) * wr <= 1e-12 * scale) {
    throw DomainError("d det(ybar)/d omega vanishes at the resonator mode (degenerate modes)");
  }

  const double c1sq = in.c1 * in.c1;
  const double c2sq = in.c2 * in.c2;
  const Complex& lambda = out.lambda;
  const Complex& dyq = out.dyq;

  out.d_omega_r = wr * wr * c1sq * y_r(1, 1) / (dyq * delta * lambda) -
                  wr * wr * c2sq * in.zext(wr) * y_r(0, 0) / lambda;
  out.d_omega_q = -wq * wq * c1sq * y_q(1, 1) / (dyq * delta * lambda) +
                  wq * wq * wq * wq * c1sq * c2sq * in.zext(wq) * y_q(1, 1) * y_q(0, 0) /
                      (dyq * delta * delta * lambda * lambda);
  out.g2 = (-wq * wq * c1sq * y_q(1, 1) / (dyq * lambda)).real();

  const double limit = 0.1 * std::abs(delta);
  if (std::abs(out.d_omega_r) > limit || std::abs(out.d_omega_q) > limit) {
    out.warnings.push_back(
        "mode shifts exceed 10% of the detuning; the small-capacitance expansion is unreliable");
  }
  return out;
}

AdmittanceMatrixFn lumped_readout_ybar(double c_node, double l_link, double c1, double c2) {
  if (!(c_node > 0.0) || !(l_link > 0.0) || c1 < 0.0 || c2 < 0.0) {
    throw DomainError("lumped resonator needs c_node, l_link > 0 and c1, c2 >= 0");
  }
  return [=](double w) {
    const Complex link = 1.0 / Complex{0.0, w * l_link};
    Eigen::Matrix2cd y;
    y(0, 0) = Complex{0.0, w * (c_node + c1)} + link;
    y(1, 1) = Complex{0.0, w * (c_node + c2)} + link;
    y(0, 1) = -link;
    y(1, 0) = -link;
    return y;
  };
}

ImpedanceFn parallel_lc_impedance(double c, double l) {
  if (!(c > 0.0) || !(l > 0.0)) throw DomainError("parallel LC needs c, l > 0");
  return [=](double w) { return 1.0 / Complex{0.0, w * c - 1.0 / (w * l)}; };
}

ImpedanceFn constant_impedance(Complex z) {
  return [z](double) { return z; };
}

}  // namespace mechpf
