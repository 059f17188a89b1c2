#pragma once

// Sweep pipelines that combine the filter network with the Purcell model.

#include <optional>
#include <span>
#include <vector>

#include "mechpf/network.hpp"
#include "mechpf/purcell.hpp"
#include "mechpf/sweep.hpp"
#include "mechpf/touchstone.hpp"

namespace mechpf {

/// `points` evenly spaced frequencies from start to stop inclusive. A zero
/// span gives one point. Throws DomainError on non-positive or reversed
/// limits, or fewer than two points for a non-zero span.
std::vector<double> linear_grid(double start_hz, double stop_hz, int points);

/// S11, S21 and Re Z_ext per grid point. With a readout system the filter
/// factor and both T1 columns are filled, with Re Z_ext(omega_r) evaluated
/// from the ladder at omega_r itself.
SweepResult simulate_sweep(const LadderFilterSpec& spec, std::span<const double> freqs_hz,
                           const std::optional<ReadoutSystem>& qubit = std::nullopt);

/// T1 spectrum on the record's own frequency points using its S11. Throws
/// DomainError when omega_r lies outside the sampled span.
SweepResult t1_from_touchstone(const TouchstoneRecord& rec, const ReadoutSystem& sys);

/// T1 spectrum without a filter: the environment is the constant resistance sys.z0.
SweepResult t1_flat(const ReadoutSystem& sys, std::span<const double> freqs_hz);

struct Enhancement {
  double factor = 0.0;  ///< filtered / unfiltered T1, +inf where the environment is lossless
  double freq_hz = 0.0;
};

/// Largest filtered/unfiltered T1 ratio in a sweep. Nullopt when no row has both values.
std::optional<Enhancement> peak_enhancement(const SweepResult& sweep);

}  // namespace mechpf
