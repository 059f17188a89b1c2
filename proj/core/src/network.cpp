#include "mechpf/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mechpf/errors.hpp"

namespace mechpf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void normalize_leading_term(ChainMatrix& cm) {
  const double scale = cm.m.cwiseAbs().maxCoeff();
  if (scale > 0.0 && std::isfinite(scale)) cm.m /= scale;
}

bool all_finite(const Eigen::Matrix2cd& m) {
  for (int i = 0; i < 4; ++i) {
    const Complex v = m(i / 2, i % 2);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

ChainMatrix series_resonator(const BvdResonator& res, double omega) {
  const Complex y = admittance(res, omega);
  if (is_pole(y)) return abcd_series(0.0);
  if (y == Complex{0.0, 0.0}) return abcd_series(Complex{kInf, 0.0});
  return abcd_series(1.0 / y);
}

ChainMatrix shunt_resonators(const BvdResonator& res, int multiplicity, double omega) {
  const Complex y = admittance(res, omega);
  if (is_pole(y)) return abcd_shunt(Complex{0.0, kInf});
  return abcd_shunt(static_cast<double>(multiplicity) * y);
}

}  // namespace

ChainMatrix operator*(const ChainMatrix& lhs, const ChainMatrix& rhs) {
  ChainMatrix out;
  out.m = lhs.m * rhs.m;
  out.pole_order = lhs.pole_order + rhs.pole_order;
  if (out.pole_order > 0) normalize_leading_term(out);
  return out;
}

ChainMatrix abcd_series(Complex z) {
  ChainMatrix out;
  if (is_pole(z)) {
    out.m << 0.0, 1.0, 0.0, 0.0;
    out.pole_order = 1;
  } else {
    out.m << 1.0, z, 0.0, 1.0;
  }
  return out;
}

ChainMatrix abcd_shunt(Complex y) {
  ChainMatrix out;
  if (is_pole(y)) {
    out.m << 0.0, 0.0, 1.0, 0.0;
    out.pole_order = 1;
  } else {
    out.m << 1.0, 0.0, y, 1.0;
  }
  return out;
}

void validate(const LadderFilterSpec& spec) {
  if (spec.order < 1) throw DomainError("ladder order must be at least 1");
  if (spec.shunt_multiplicity < 1) throw DomainError("shunt multiplicity must be at least 1");
  if (!(spec.z0 > 0.0) || !std::isfinite(spec.z0)) {
    throw DomainError("reference impedance z0 must be positive");
  }
  validate(spec.series);
  validate(spec.shunt);
}

std::vector<std::string> design_rule_warnings(const LadderFilterSpec& spec) {
  validate(spec);
  std::vector<std::string> warnings;
  const auto series = resonance_antiresonance(bvd_from_specs(spec.series));
  const auto shunt = resonance_antiresonance(bvd_from_specs(spec.shunt));
  const double mismatch = std::abs(shunt.f_a - series.f_r) / series.f_r;
  if (spec.order > 1 && mismatch > 0.01) {
    std::ostringstream msg;
    msg << "shunt antiresonance " << shunt.f_a << " Hz is " << mismatch * 100.0
        << "% from the series resonance " << series.f_r << " Hz (rule: within 1%)";
    warnings.push_back(msg.str());
  }
  if (spec.order > 1 && shunt.f_r >= series.f_r) {
    warnings.push_back("shunt resonance is not below the series resonance; no bandpass response");
  }
  return warnings;
}

std::vector<ChainMatrix> ladder_elements(const LadderFilterSpec& spec, double omega) {
  validate(spec);
  const BvdResonator series = bvd_from_specs(spec.series);
  const BvdResonator shunt = bvd_from_specs(spec.shunt);
  std::vector<ChainMatrix> elements;
  elements.reserve(static_cast<std::size_t>(2 * spec.order - 1));
  const ChainMatrix series_abcd = series_resonator(series, omega);
  elements.push_back(series_abcd);
  if (spec.order > 1) {
    const ChainMatrix shunt_abcd = shunt_resonators(shunt, spec.shunt_multiplicity, omega);
    for (int i = 1; i < spec.order; ++i) {
      elements.push_back(shunt_abcd);
      elements.push_back(series_abcd);
    }
  }
  return elements;
}

TwoPortNetwork::TwoPortNetwork(std::vector<double> freqs_hz, std::vector<ChainMatrix> chain,
                               double z0)
    : freqs_(std::move(freqs_hz)), chain_(std::move(chain)), z0_(z0) {
  if (freqs_.empty()) throw DomainError("two-port network needs at least one frequency");
  if (freqs_.size() != chain_.size()) {
    throw DomainError("frequency grid and chain matrices differ in length");
  }
  if (!(z0_ > 0.0) || !std::isfinite(z0_)) throw DomainError("z0 must be positive");
  for (std::size_t i = 0; i < freqs_.size(); ++i) {
    if (!(freqs_[i] > 0.0) || !std::isfinite(freqs_[i])) {
      throw DomainError("frequencies must be positive and finite");
    }
    if (i > 0 && !(freqs_[i] > freqs_[i - 1])) {
      throw DomainError("frequencies must be strictly increasing");
    }
  }
}

TwoPortNetwork TwoPortNetwork::cascade(const TwoPortNetwork& next) const {
  if (next.freqs_ != freqs_) throw DomainError("cascade requires identical frequency grids");
  if (next.z0_ != z0_) throw DomainError("cascade requires identical reference impedance");
  std::vector<ChainMatrix> out(chain_.size());
  for (std::size_t i = 0; i < chain_.size(); ++i) out[i] = chain_[i] * next.chain_[i];
  return TwoPortNetwork(freqs_, std::move(out), z0_);
}

TwoPortNetwork build_ladder(const LadderFilterSpec& spec, std::span<const double> freqs_hz) {
  validate(spec);
  if (freqs_hz.empty()) throw DomainError("build_ladder requires a non-empty frequency grid");
  const BvdResonator series = bvd_from_specs(spec.series);
  const BvdResonator shunt = bvd_from_specs(spec.shunt);
  std::vector<ChainMatrix> chain;
  chain.reserve(freqs_hz.size());
  for (const double f : freqs_hz) {
    if (!(f > 0.0)) throw DomainError("frequencies must be positive");
    const double omega = hz_to_rad(f);
    const ChainMatrix series_abcd = series_resonator(series, omega);
    ChainMatrix acc = series_abcd;
    if (spec.order > 1) {
      // Same left fold as over ladder_elements, without the per-point allocation.
      const ChainMatrix shunt_abcd = shunt_resonators(shunt, spec.shunt_multiplicity, omega);
      for (int k = 1; k < spec.order; ++k) acc = (acc * shunt_abcd) * series_abcd;
    }
    chain.push_back(acc);
  }
  return TwoPortNetwork({freqs_hz.begin(), freqs_hz.end()}, std::move(chain), spec.z0);
}

std::optional<SMatrix> abcd_to_s(const ChainMatrix& abcd, double z0) {
  if (!(z0 > 0.0)) throw DomainError("abcd_to_s requires z0 > 0");
  const Eigen::Matrix2cd& m = abcd.m;
  if (!all_finite(m)) return std::nullopt;
  const Complex a = m(0, 0), b = m(0, 1) / z0, c = m(1, 0) * z0, d = m(1, 1);
  const Complex den = a + b + c + d;
  if (den == Complex{0.0, 0.0} || !std::isfinite(std::abs(den))) return std::nullopt;
  SMatrix s;
  s(0, 0) = (a + b - c - d) / den;
  s(1, 1) = (-a + b - c + d) / den;
  if (abcd.is_finite()) {
    // A determinant within rounding of 1 is taken as exactly 1 so that
    // reciprocal cascades with large entries keep S12 == S21.
    const Complex ad = m(0, 0) * m(1, 1);
    const Complex bc = m(0, 1) * m(1, 0);
    const Complex det = ad - bc;
    const double rounding = 64.0 * std::numeric_limits<double>::epsilon() *
                            std::max(1.0, std::abs(ad) + std::abs(bc));
    s(1, 0) = 2.0 / den;
    s(0, 1) = std::abs(det - 1.0) <= rounding ? s(1, 0) : 2.0 * det / den;
  } else {
    s(1, 0) = 0.0;
    s(0, 1) = 0.0;
  }
  return s;
}

std::vector<std::optional<SMatrix>> abcd_to_s(const TwoPortNetwork& net) {
  std::vector<std::optional<SMatrix>> out;
  out.reserve(net.size());
  for (const auto& cm : net.chain()) out.push_back(abcd_to_s(cm, net.z0()));
  return out;
}

std::optional<Complex> input_impedance(const ChainMatrix& abcd, double z0) {
  const Eigen::Matrix2cd& m = abcd.m;
  if (!all_finite(m)) return std::nullopt;
  const Complex den = m(1, 0) * z0 + m(1, 1);
  if (den == Complex{0.0, 0.0}) return std::nullopt;
  return (m(0, 0) * z0 + m(0, 1)) / den;
}

ExtractedResistance re_zext_from_s11(Complex s11, double z0) {
  if (!(z0 > 0.0)) throw DomainError("re_zext_from_s11 requires z0 > 0");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double mag = std::abs(s11);
  if (!std::isfinite(mag) || mag > 1.0 + kReflectionNoiseTolerance) {
    return {nan, ResistanceStatus::non_passive};
  }
  if (s11 == Complex{1.0, 0.0}) return {kInf, ResistanceStatus::unbounded};
  const double value = z0 * (1.0 - mag * mag) / std::norm(1.0 - s11);
  return {std::max(value, 0.0), ResistanceStatus::ok};
}

std::vector<std::optional<double>> insertion_loss_db(const TwoPortNetwork& net) {
  std::vector<std::optional<double>> out;
  out.reserve(net.size());
  for (const auto& s : abcd_to_s(net)) {
    if (!s) {
      out.emplace_back();
      continue;
    }
    const double t = std::abs((*s)(1, 0));
    out.emplace_back(t == 0.0 ? kInf : -20.0 * std::log10(t));
  }
  return out;
}

std::optional<Bandwidth> bandwidth(const TwoPortNetwork& net, double level_db) {
  const auto il = insertion_loss_db(net);
  return bandwidth(net.freqs_hz(), il, level_db);
}

std::optional<Bandwidth> bandwidth(std::span<const double> freqs_hz,
                                   std::span<const std::optional<double>> il, double level_db) {
  if (freqs_hz.size() != il.size()) throw DomainError("bandwidth: grid and data differ in length");
  if (!(level_db > 0.0)) throw DomainError("bandwidth level must be positive");
  std::optional<std::size_t> peak;
  for (std::size_t i = 0; i < il.size(); ++i) {
    if (!il[i] || !std::isfinite(*il[i])) continue;
    if (!peak || *il[i] < *il[*peak]) peak = i;
  }
  if (!peak) return std::nullopt;

  const double threshold = *il[*peak] + level_db;
  const auto inside = [&](std::size_t i) { return il[i] && *il[i] <= threshold; };

  std::size_t lo = *peak;
  while (lo > 0 && inside(lo - 1)) --lo;
  std::size_t hi = *peak;
  while (hi + 1 < il.size() && inside(hi + 1)) ++hi;

  const auto crossing = [&](std::size_t in, std::size_t out) {
    const double a = *il[in];
    if (!il[out] || !std::isfinite(*il[out])) return freqs_hz[in];
    const double frac = (threshold - a) / (*il[out] - a);
    return freqs_hz[in] + frac * (freqs_hz[out] - freqs_hz[in]);
  };

  Bandwidth bw;
  bw.peak_hz = freqs_hz[*peak];
  bw.peak_insertion_loss_db = *il[*peak];
  bw.lower_hz = lo > 0 ? crossing(lo, lo - 1) : freqs_hz[lo];
  bw.upper_hz = hi + 1 < il.size() ? crossing(hi, hi + 1) : freqs_hz[hi];
  bw.width_hz = bw.upper_hz - bw.lower_hz;
  const std::size_t first = lo > 0 ? lo - 1 : lo;
  const std::size_t last = hi + 1 < il.size() ? hi + 1 : hi;
  for (std::size_t i = first; i < last; ++i) {
    bw.resolution_hz = std::max(bw.resolution_hz, freqs_hz[i + 1] - freqs_hz[i]);
  }
  return bw;
}

}  // namespace mechpf
