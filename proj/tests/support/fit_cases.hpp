#pragma once

// Synthetic fit problems shared by the unit and acceptance tests.

#include <random>

#include "mechpf/fitting.hpp"

namespace fitcase {

struct BvdCase {
  mechpf::ResonatorSpec truth;
  mechpf::FitProblem problem;
};

struct LadderCase {
  mechpf::LadderFilterSpec truth;
  mechpf::FitProblem problem;
};

/// Random resonator, its noiseless response on a grid around the
/// resonance pair, and a start with every parameter scaled by 1 +/- `spread`.
BvdCase random_bvd(std::mt19937_64& rng, mechpf::ObservableKind kind, double spread);

/// Random order-3 ladder with matched shunt antiresonance, its noiseless S21,
/// and a start with every fitted parameter scaled by 1 +/- `spread`.
LadderCase random_ladder(std::mt19937_64& rng, double spread, int order = 3);

/// Adds complex Gaussian noise of standard deviation `level` times the RMS
/// target magnitude.
void add_noise(mechpf::FitProblem& problem, double level, std::mt19937_64& rng);

double rel_error(double value, double truth);

}  // namespace fitcase
