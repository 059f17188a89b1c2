#pragma once

#include <string>
#include <string_view>

#include "mechpf/sweep.hpp"

namespace mechpf {

inline constexpr std::string_view kSweepCsvHeader =
    "freq_hz,s11_re,s11_im,s21_re,s21_im,re_zext_ohm,filter_factor,t1_unfiltered_s,"
    "t1_filtered_s";

/// Header plus one row per point; flagged values are empty cells. Numbers
/// use the shortest exact round-trip representation; infinities are "inf".
std::string write_sweep_csv(const SweepResult& sweep);

/// Inverse of write_sweep_csv. Throws ParseError with a line number on a
/// wrong header, a wrong cell count, bad numbers, or half-empty complex pairs.
SweepResult read_sweep_csv(std::string_view text);

}  // namespace mechpf
