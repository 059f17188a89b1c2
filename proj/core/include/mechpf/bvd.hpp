#pragma once

// Butterworth-van Dyke (BVD) model of a single piezoelectric resonator: a
// static capacitance c_g in parallel with a motional series R-L-C branch.
//
// Conventions: SI units (rad/s, F, H, ohm), e^{+i omega t} time dependence, so
// a capacitor contributes +i omega C to an admittance.
//
// Quality factor: the relation used here is Q = (pi^2/8) / (omega_m C R),
// which is larger than the textbook series-RLC value 1/(omega_m C R) by
// pi^2/8 ~ 1.234. Multiply a textbook Q by pi^2/8 before passing it in.

#include <optional>

#include "mechpf/units.hpp"

namespace mechpf {

/// pi^2/8, the scale relating motional-to-static capacitance ratio to k^2.
inline constexpr double kCouplingScale = std::numbers::pi * std::numbers::pi / 8.0;

/// Upper bound (exclusive) on the representable piezoelectric coupling.
inline constexpr double kMaxCoupling = 1.0 / kCouplingScale;

/// Quality factor; unbounded Q (lossless resonator) is a distinct state, not a float sentinel.
class Quality {
 public:
  /// Throws DomainError unless q is finite and positive.
  static Quality finite(double q);
  static Quality unbounded() noexcept { return Quality{}; }

  bool is_unbounded() const noexcept { return !value_.has_value(); }
  /// Throws DomainError when unbounded.
  double value() const;
  /// Finite value, or +infinity when unbounded. For display and comparisons only.
  double value_or_infinity() const noexcept;

  friend bool operator==(const Quality&, const Quality&) = default;

 private:
  Quality() = default;
  std::optional<double> value_;
};

struct BvdResonator {
  double c_g = 0.0;  ///< static (electrostatic) capacitance, F
  double r = 0.0;    ///< motional resistance, ohm; 0 is lossless
  double l = 0.0;    ///< motional inductance, H
  double c = 0.0;    ///< motional capacitance, F
};

struct ResonatorSpec {
  double omega_m = 0.0;  ///< motional resonance, rad/s
  double k2 = 0.0;       ///< piezoelectric coupling, pi^2 c / (8 c_g)
  Quality q = Quality::unbounded();
  double c_g = 0.0;  ///< static capacitance, F
};

struct ResonancePair {
  double f_r = 0.0;  ///< resonance (admittance pole), Hz
  double f_a = 0.0;  ///< antiresonance (lossless admittance zero), Hz
};

/// Throws DomainError if the circuit values violate c_g, l, c > 0, r >= 0.
void validate(const BvdResonator& res);
/// Throws DomainError if omega_m, c_g <= 0 or k2 outside (0, 8/pi^2).
void validate(const ResonatorSpec& spec);

/// Admittance of the BVD circuit at angular frequency omega > 0.
///
/// At the exact series resonance of a lossless resonator the motional branch
/// is a short; the result is then {0, +inf}. Use `is_pole` to detect it.
Complex admittance(const BvdResonator& res, double omega);

/// True when an admittance (or impedance) value is the infinite pole marker.
bool is_pole(Complex value) noexcept;

BvdResonator bvd_from_specs(const ResonatorSpec& spec);
ResonatorSpec specs_from_bvd(const BvdResonator& res);

/// f_R = 1/(2 pi sqrt(l c)), f_A = f_R sqrt(1 + c/c_g). f_A is always taken
/// from the lossless circuit, also for lossy resonators.
ResonancePair resonance_antiresonance(const BvdResonator& res);

/// (pi^2/8)(f_A^2 - f_R^2)/f_A^2. Throws DomainError unless f_A > f_R > 0.
///
/// For a BVD circuit this equals (pi^2/8) x / (1 + x) with x = c/c_g, which
/// agrees with the circuit coupling pi^2 x / 8 only to first order in x.
double k2_from_freqs(double f_r, double f_a);

}  // namespace mechpf
