#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mechpf/units.hpp"

namespace mechpf {

/// One frequency point of a filter/T1 sweep. Empty optionals are per-point
/// error flags (not computed, or not representable at this frequency).
struct SweepRow {
  double freq_hz = 0.0;
  std::optional<Complex> s11;
  std::optional<Complex> s21;
  std::optional<double> re_zext_ohm;
  std::optional<double> filter_factor;
  std::optional<double> t1_unfiltered_s;
  std::optional<double> t1_filtered_s;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

}  // namespace mechpf
