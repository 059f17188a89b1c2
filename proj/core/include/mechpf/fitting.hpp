#pragma once

// Weighted nonlinear least-squares extraction of BVD and ladder parameters
// from frequency responses.
//
// Parameters are optimized as logarithms of positive quantities, so bounds
// are enforced by clamping in log space. Residuals stack the real and
// imaginary parts of (model - target) scaled by sqrt(weight); with
// `magnitude_only` they are the differences of magnitudes instead.
//
// Resonator parameters: f_m (Hz), k2, q, c_g (F).
// Ladder parameters: f_series, f_shunt (Hz), k2_series, k2_shunt, q_series,
// q_shunt, c_g_scale (multiplies both static capacitances of the initial spec).
// An unbounded initial Q is held fixed and omitted from the parameter list.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mechpf/bvd.hpp"
#include "mechpf/network.hpp"

namespace mechpf {

enum class ObservableKind { admittance, s11, s21 };

enum class FitStatus { converged, max_iterations, stalled };

struct ParameterBound {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
};

struct FitOptions {
  int max_iterations = 200;
  bool magnitude_only = false;
  /// Relative residual (weighted RMS residual / weighted RMS |target|)
  /// above which a fit is flagged as a model mismatch.
  double mismatch_threshold = 0.05;
};

struct FitProblem {
  std::vector<double> freqs_hz;
  std::vector<Complex> target;
  ObservableKind kind = ObservableKind::s21;
  /// Resonator for fit_bvd, ladder for fit_ladder. For S-parameter
  /// observables a single resonator is the series element of an order-1
  /// ladder between two z0 ports.
  std::variant<ResonatorSpec, LadderFilterSpec> initial;
  double z0 = 50.0;  ///< port impedance for a single resonator's S-parameters
  /// Overrides of the default bounds [initial/4, 4*initial] (k2 capped below 8/pi^2).
  std::vector<ParameterBound> bounds;
  /// Per-frequency weights; empty means uniform.
  std::vector<double> weights;
  FitOptions options;
};

struct FitParameter {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;  ///< one-sigma from the local quadratic model
};

struct FitReport {
  std::vector<FitParameter> parameters;
  double residual_rms = 0.0;       ///< weighted RMS of complex (or magnitude) residuals
  double relative_residual = 0.0;  ///< residual_rms / weighted RMS of |target|
  FitStatus status = FitStatus::converged;
  int iterations = 0;
  std::vector<double> residual_history;  ///< residual_rms after each accepted iteration
  bool model_mismatch = false;
  std::vector<std::string> warnings;
  std::optional<ResonatorSpec> resonator;
  std::optional<LadderFilterSpec> ladder;

  /// Throws std::out_of_range for an unknown name.
  const FitParameter& parameter(const std::string& name) const;
};

/// Throws DomainError for inconsistent problems and NumericalError when the
/// residual at the initial point is not finite.
FitReport fit_bvd(const FitProblem& problem);
FitReport fit_ladder(const FitProblem& problem);

/// Forward models used by the fits.
std::vector<Complex> resonator_response(const ResonatorSpec& spec, ObservableKind kind,
                                        std::span<const double> freqs_hz, double z0);
std::vector<Complex> ladder_response(const LadderFilterSpec& spec, ObservableKind kind,
                                     std::span<const double> freqs_hz);

std::string to_string(FitStatus status);
std::string to_string(ObservableKind kind);

}  // namespace mechpf
