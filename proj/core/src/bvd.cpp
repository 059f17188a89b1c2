#include "mechpf/bvd.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mechpf/errors.hpp"

namespace mechpf {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

Quality Quality::finite(double q) {
  if (!positive_finite(q)) {
    throw DomainError("quality factor must be finite and positive, got " + std::to_string(q));
  }
  Quality out;
  out.value_ = q;
  return out;
}

double Quality::value() const {
  if (!value_) throw DomainError("quality factor is unbounded");
  return *value_;
}

double Quality::value_or_infinity() const noexcept {
  return value_ ? *value_ : std::numeric_limits<double>::infinity();
}

void validate(const BvdResonator& res) {
  if (!positive_finite(res.c_g)) throw DomainError("BVD c_g must be positive");
  if (!positive_finite(res.l)) throw DomainError("BVD l must be positive");
  if (!positive_finite(res.c)) throw DomainError("BVD c must be positive");
  if (!std::isfinite(res.r) || res.r < 0.0) throw DomainError("BVD r must be non-negative");
}

void validate(const ResonatorSpec& spec) {
  if (!positive_finite(spec.omega_m)) throw DomainError("resonator omega_m must be positive");
  if (!positive_finite(spec.c_g)) throw DomainError("resonator c_g must be positive");
  if (!(spec.k2 > 0.0) || !std::isfinite(spec.k2)) {
    throw DomainError("resonator k2 must be positive");
  }
  if (spec.k2 >= kMaxCoupling) {
    throw DomainError("resonator k2 = " + std::to_string(spec.k2) +
                      " exceeds the representable coupling 8/pi^2");
  }
}

Complex admittance(const BvdResonator& res, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw DomainError("admittance requires a positive angular frequency");
  }
  const double reactance = omega * res.l - 1.0 / (omega * res.c);
  const Complex static_branch{0.0, omega * res.c_g};
  if (res.r == 0.0 && reactance == 0.0) {
    return {0.0, std::numeric_limits<double>::infinity()};
  }
  return static_branch + 1.0 / Complex{res.r, reactance};
}

bool is_pole(Complex value) noexcept {
  return std::isinf(value.real()) || std::isinf(value.imag());
}

BvdResonator bvd_from_specs(const ResonatorSpec& spec) {
  validate(spec);
  BvdResonator res;
  res.c_g = spec.c_g;
  res.c = spec.k2 * spec.c_g / kCouplingScale;
  res.l = 1.0 / (spec.omega_m * spec.omega_m * res.c);
  res.r = spec.q.is_unbounded() ? 0.0 : kCouplingScale / (spec.omega_m * res.c * spec.q.value());
  return res;
}

ResonatorSpec specs_from_bvd(const BvdResonator& res) {
  validate(res);
  ResonatorSpec spec;
  spec.c_g = res.c_g;
  spec.omega_m = 1.0 / std::sqrt(res.l * res.c);
  spec.k2 = kCouplingScale * res.c / res.c_g;
  spec.q = res.r == 0.0 ? Quality::unbounded()
                        : Quality::finite(kCouplingScale / (spec.omega_m * res.c * res.r));
  return spec;
}

ResonancePair resonance_antiresonance(const BvdResonator& res) {
  validate(res);
  const double f_r = 1.0 / (kTwoPi * std::sqrt(res.l * res.c));
  return {f_r, f_r * std::sqrt(1.0 + res.c / res.c_g)};
}

double k2_from_freqs(double f_r, double f_a) {
  if (!(f_r > 0.0) || !(f_a > f_r) || !std::isfinite(f_a)) {
    throw DomainError("k2_from_freqs requires f_A > f_R > 0");
  }
  // (f_A^2 - f_R^2)/f_A^2 written to avoid cancellation for close pairs.
  const double ratio = f_r / f_a;
  return kCouplingScale * (1.0 - ratio) * (1.0 + ratio);
}

}  // namespace mechpf
