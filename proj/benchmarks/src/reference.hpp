#pragma once

// Order-3 ladder used by every benchmark: series 3.18 GHz, shunt 3.00 GHz.

#include "mechpf/network.hpp"
#include "mechpf/units.hpp"

namespace bench {

inline mechpf::LadderFilterSpec reference_ladder() {
  const double k2 = 0.1357;
  mechpf::LadderFilterSpec spec;
  spec.order = 3;
  spec.shunt_multiplicity = 2;
  spec.z0 = 50.0;
  spec.series = {mechpf::kTwoPi * 3.18e9, k2, mechpf::Quality::finite(800.0), 0.5e-12};
  spec.shunt = {mechpf::kTwoPi * 3.00e9, k2, mechpf::Quality::finite(800.0), 0.5e-12};
  return spec;
}

}  // namespace bench
