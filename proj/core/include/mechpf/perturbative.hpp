#pragma once

// Lowest-order (small coupling capacitance) mode shifts of a readout
// resonator coupled through C1 to a qubit branch Z_q and through C2 to an
// environment Z_ext.
//
// `ybar` is the reactive 2x2 admittance matrix of the resonator seen from
// node 1 (qubit side) and node 2 (environment side), with the i*omega*C1 and
// i*omega*C2 terms already absorbed. The bare resonator mode is the real root
// of det ybar, the bare qubit frequency the real zero of 1/Z_q. With
// Delta = omega_q - omega_r, lambda = d(det ybar)/d omega at omega_r and
// Y'_q = d(1/Z_q)/d omega at omega_q:
//
//   d_omega_r = w_r^2 C1^2 Y22(w_r) / (Y'_q Delta lambda) - w_r^2 C2^2 Z_ext(w_r) Y11(w_r) / lambda
//   d_omega_q = -w_q^2 C1^2 Y22(w_q) / (Y'_q Delta lambda)
//               + w_q^4 C1^2 C2^2 Z_ext(w_q) Y22(w_q) Y11(w_q) / (Y'_q Delta^2 lambda^2)
//   g^2       = -w_q^2 C1^2 Y22(w_q) / (Y'_q lambda)
//
// Linewidths are kappa = 2 Im d_omega_r and gamma_q = 2 Im d_omega_q
// (e^{+i omega t} convention: decay means positive imaginary frequency).

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mechpf/purcell.hpp"

namespace mechpf {

using AdmittanceMatrixFn = std::function<Eigen::Matrix2cd(double omega)>;

struct PerturbativeInputs {
  AdmittanceMatrixFn ybar;
  ImpedanceFn zq;
  ImpedanceFn zext;
  double c1 = 0.0;  ///< qubit coupling capacitance, F
  double c2 = 0.0;  ///< environment coupling capacitance, F
};

struct PerturbativeShifts {
  double omega_r = 0.0;  ///< bare resonator mode, rad/s
  double omega_q = 0.0;  ///< bare qubit frequency, rad/s
  Complex d_omega_r;
  Complex d_omega_q;
  double g2 = 0.0;  ///< rad^2/s^2
  Complex lambda;   ///< d det(ybar)/d omega at omega_r
  Complex dyq;      ///< d(1/Z_q)/d omega at omega_q
  std::vector<std::string> warnings;

  double detuning() const noexcept { return omega_q - omega_r; }
  double kappa() const noexcept { return 2.0 * d_omega_r.imag(); }
  double gamma_q() const noexcept { return 2.0 * d_omega_q.imag(); }
};

/// Throws DomainError for negative capacitances, coincident bare modes or a
/// degenerate lambda; NumericalError when root refinement or the finite
/// difference derivatives do not converge.
PerturbativeShifts perturbative_shifts(const PerturbativeInputs& inputs, double omega_r_guess,
                                       double omega_q_guess);

/// Central difference, Richardson-refined once, starting at step 1e-6*|x| and
/// adapting until halving the step changes the result by < rel_tol.
Complex derivative(const std::function<Complex(double)>& f, double x, double rel_tol = 1e-6);

/// Symmetric lumped resonator: capacitance c_node from each node to ground,
/// inductance l_link between the nodes, plus the absorbed coupling
/// capacitances c1 (node 1) and c2 (node 2).
AdmittanceMatrixFn lumped_readout_ybar(double c_node, double l_link, double c1, double c2);

/// Parallel LC to ground (linearized transmon).
ImpedanceFn parallel_lc_impedance(double c, double l);

ImpedanceFn constant_impedance(Complex z);

}  // namespace mechpf
