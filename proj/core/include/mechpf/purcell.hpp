#pragma once

// Purcell decay of a qubit through a dispersively coupled readout resonator,
// with and without a filter between the resonator and its environment.
// All rates are angular (rad/s); T1 values are in seconds.

#include <functional>
#include <span>

#include "mechpf/sweep.hpp"
#include "mechpf/units.hpp"

namespace mechpf {

struct ReadoutSystem {
  double omega_r = 0.0;  ///< readout resonator, rad/s
  double omega_q = 0.0;  ///< qubit, rad/s
  double g = 0.0;        ///< qubit-resonator coupling, rad/s
  double kappa = 0.0;    ///< resonator energy decay rate, rad/s
  double z0 = 50.0;      ///< environment impedance without a filter, ohm

  /// omega_q - omega_r
  double detuning() const noexcept { return omega_q - omega_r; }
};

/// Throws DomainError unless every field is finite and positive.
void validate(const ReadoutSystem& sys);

/// Environmental impedance as a function of angular frequency. Must be
/// callable concurrently; a non-finite return marks a bad point.
using ImpedanceFn = std::function<Complex(double omega)>;

/// g^2 kappa / (Delta^2 + (kappa/2)^2).
double purcell_rate_lorentzian(const ReadoutSystem& sys);

/// kappa sin^2(theta) with tan(2 theta) = 2 g / Delta: the resonator weight
/// of the qubit-like dressed state in the one-excitation subspace, times kappa.
double jc_purcell_rate(const ReadoutSystem& sys);

/// Re Z_ext(omega_q) / Re Z_ext(omega_r). Throws DomainError when
/// Re Z_ext(omega_r) is not positive and finite.
double filter_factor(const ImpedanceFn& zext, double omega_q, double omega_r);

/// Unfiltered T1 = 1/jc_purcell_rate and filtered T1 = unfiltered / filter
/// factor on a qubit-frequency grid (Hz), with g and kappa held fixed.
/// sys.omega_q is ignored. Points where Re Z_ext(omega_q) is unusable keep
/// their T1 columns empty. Re Z_ext(omega_r) must be valid.
SweepResult filtered_t1_spectrum(const ReadoutSystem& sys, const ImpedanceFn& zext,
                                 std::span<const double> qubit_grid_hz);

/// Same computation from pre-extracted resistances: `re_zext_q[i]` is
/// Re Z_ext at qubit_grid_hz[i] (empty = flagged), `re_zext_r` at omega_r.
SweepResult filtered_t1_from_resistance(const ReadoutSystem& sys,
                                        std::span<const double> qubit_grid_hz,
                                        std::span<const std::optional<double>> re_zext_q,
                                        double re_zext_r);

}  // namespace mechpf
