#pragma once

// Shared filter and readout scenarios built on the library.

#include "mechpf/sweep.hpp"
#include "mechpf/touchstone.hpp"

namespace scenario {

/// Stand-in for a measured two-port: the Q = 800 reference ladder moved to a
/// 3.70 GHz series resonance with impedances preserved, sampled 3.0-4.4 GHz.
mechpf::TouchstoneRecord measured_stand_in();

/// Widest contiguous frequency run (Hz, between grid points) where
/// filtered/unfiltered T1 is at least `factor`.
double widest_enhanced_run_hz(const mechpf::SweepResult& sweep, double factor);

}  // namespace scenario
