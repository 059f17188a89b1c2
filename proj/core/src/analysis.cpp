#include "mechpf/analysis.hpp"

#include <cmath>

#include "mechpf/errors.hpp"
#include "text_format.hpp"

namespace mechpf {

namespace {

std::optional<double> resistance_or_flag(const std::optional<Complex>& s11, double z0) {
  if (!s11) return std::nullopt;
  const auto r = re_zext_from_s11(*s11, z0);
  if (r.status == ResistanceStatus::non_passive) return std::nullopt;
  return r.ohms;
}

}  // namespace

std::vector<double> linear_grid(double start_hz, double stop_hz, int points) {
  if (!(start_hz > 0.0) || !std::isfinite(stop_hz) || stop_hz < start_hz) {
    throw DomainError("sweep limits must satisfy 0 < start <= stop");
  }
  if (start_hz == stop_hz) return {start_hz};
  if (points < 2) throw DomainError("a non-zero sweep span needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = (stop_hz - start_hz) / (points - 1);
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = start_hz + i * step;
  grid.back() = stop_hz;
  return grid;
}

SweepResult simulate_sweep(const LadderFilterSpec& spec, std::span<const double> freqs_hz,
                           const std::optional<ReadoutSystem>& qubit) {
  const TwoPortNetwork net = build_ladder(spec, freqs_hz);
  const auto s = abcd_to_s(net);
  std::vector<std::optional<double>> re_zext(s.size());
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    re_zext[i] = s[i] ? resistance_or_flag((*s[i])(0, 0), spec.z0) : std::nullopt;
    flagged += re_zext[i] ? 0 : 1;
  }

  SweepResult out;
  if (qubit) {
    const double f_r = rad_to_hz(qubit->omega_r);
    const TwoPortNetwork at_r = build_ladder(spec, std::vector<double>{f_r});
    const auto s_r = abcd_to_s(at_r.chain()[0], spec.z0);
    const auto re_r = s_r ? resistance_or_flag((*s_r)(0, 0), spec.z0) : std::nullopt;
    if (!re_r || !(*re_r > 0.0) || !std::isfinite(*re_r)) {
      throw DomainError("the filter presents no usable resistance at the resonator frequency " +
                        detail::format_number(f_r) + " Hz");
    }
    out = filtered_t1_from_resistance(*qubit, freqs_hz, re_zext, *re_r);
  } else {
    out.rows.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.rows[i].freq_hz = freqs_hz[i];
      out.rows[i].re_zext_ohm = re_zext[i];
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i]) continue;
    out.rows[i].s11 = (*s[i])(0, 0);
    out.rows[i].s21 = (*s[i])(1, 0);
    out.rows[i].re_zext_ohm = re_zext[i];
  }
  for (auto& w : design_rule_warnings(spec)) out.warnings.push_back(std::move(w));
  if (flagged > 0) {
    out.warnings.push_back(std::to_string(flagged) +
                           " frequency points have no usable reflection and are flagged");
  }
  return out;
}

SweepResult t1_from_touchstone(const TouchstoneRecord& rec, const ReadoutSystem& sys) {
  validate(rec);
  const double f_r = rad_to_hz(sys.omega_r);
  const auto s_r = interpolate_s(rec, f_r);
  if (!s_r) {
    throw DomainError("resonator frequency " + detail::format_number(f_r) +
                      " Hz lies outside the measured span");
  }
  const auto re_r = resistance_or_flag((*s_r)(0, 0), rec.z0);
  if (!re_r || !(*re_r > 0.0) || !std::isfinite(*re_r)) {
    throw DomainError("measured reflection gives no usable resistance at the resonator frequency");
  }
  std::vector<std::optional<double>> re_q;
  re_q.reserve(rec.s.size());
  for (const auto& s : rec.s) re_q.push_back(resistance_or_flag(s(0, 0), rec.z0));
  SweepResult out = filtered_t1_from_resistance(sys, rec.freqs_hz, re_q, *re_r);
  std::size_t flagged = 0;
  for (std::size_t i = 0; i < rec.s.size(); ++i) {
    out.rows[i].s11 = rec.s[i](0, 0);
    out.rows[i].s21 = rec.s[i](1, 0);
    flagged += re_q[i] ? 0 : 1;
  }
  if (flagged > 0) {
    out.warnings.push_back(std::to_string(flagged) +
                           " measured points are non-passive beyond tolerance and are flagged");
  }
  return out;
}

SweepResult t1_flat(const ReadoutSystem& sys, std::span<const double> freqs_hz) {
  const std::vector<std::optional<double>> re_q(freqs_hz.size(), sys.z0);
  return filtered_t1_from_resistance(sys, freqs_hz, re_q, sys.z0);
}

std::optional<Enhancement> peak_enhancement(const SweepResult& sweep) {
  std::optional<Enhancement> best;
  for (const auto& row : sweep.rows) {
    if (!row.t1_filtered_s || !row.t1_unfiltered_s) continue;
    const double ratio = *row.t1_filtered_s / *row.t1_unfiltered_s;
    if (std::isnan(ratio)) continue;
    if (!best || ratio > best->factor) best = Enhancement{ratio, row.freq_hz};
  }
  return best;
}

}  // namespace mechpf
