#include "mechpf/purcell.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mechpf/errors.hpp"

namespace mechpf {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

std::optional<double> usable_resistance(Complex z) {
  const double re = z.real();
  if (!std::isfinite(re) || !std::isfinite(z.imag()) || re < 0.0) return std::nullopt;
  return re;
}

}  // namespace

void validate(const ReadoutSystem& sys) {
  if (!positive_finite(sys.omega_r)) throw DomainError("omega_r must be positive");
  if (!positive_finite(sys.omega_q)) throw DomainError("omega_q must be positive");
  if (!positive_finite(sys.g)) throw DomainError("g must be positive");
  if (!positive_finite(sys.kappa)) throw DomainError("kappa must be positive");
  if (!positive_finite(sys.z0)) throw DomainError("z0 must be positive");
}

double purcell_rate_lorentzian(const ReadoutSystem& sys) {
  validate(sys);
  const double delta = sys.detuning();
  const double half_kappa = 0.5 * sys.kappa;
  return sys.g * sys.g * sys.kappa / (delta * delta + half_kappa * half_kappa);
}

double jc_purcell_rate(const ReadoutSystem& sys) {
  validate(sys);
  // sin^2(theta) = (1 - cos 2theta)/2 with cos 2theta = |Delta| / W, W = sqrt(Delta^2 + 4g^2).
  // Rewritten as 2g^2 / (W (W + |Delta|)) so the large-detuning tail keeps full precision.
  const double abs_delta = std::abs(sys.detuning());
  const double w = std::hypot(sys.detuning(), 2.0 * sys.g);
  const double sin2 = 2.0 * sys.g * sys.g / (w * (w + abs_delta));
  return sys.kappa * sin2;
}

double filter_factor(const ImpedanceFn& zext, double omega_q, double omega_r) {
  const Complex zr = zext(omega_r);
  if (!positive_finite(zr.real())) {
    throw DomainError("Re Z_ext at the resonator frequency must be positive and finite");
  }
  return zext(omega_q).real() / zr.real();
}

SweepResult filtered_t1_from_resistance(const ReadoutSystem& sys,
                                        std::span<const double> qubit_grid_hz,
                                        std::span<const std::optional<double>> re_zext_q,
                                        double re_zext_r) {
  if (qubit_grid_hz.size() != re_zext_q.size()) {
    throw DomainError("qubit grid and resistance samples differ in length");
  }
  ReadoutSystem checked = sys;
  checked.omega_q = checked.omega_r;
  validate(checked);
  if (!positive_finite(re_zext_r)) {
    throw DomainError("Re Z_ext at the resonator frequency must be positive and finite");
  }
  SweepResult out;
  if (!qubit_grid_hz.empty()) {
    const double lo = hz_to_rad(qubit_grid_hz.front());
    const double hi = hz_to_rad(qubit_grid_hz.back());
    if (sys.omega_r < lo || sys.omega_r > hi) {
      std::ostringstream msg;
      msg << "resonator frequency " << rad_to_hz(sys.omega_r)
          << " Hz lies outside the qubit grid span";
      out.warnings.push_back(msg.str());
    }
  }
  out.rows.reserve(qubit_grid_hz.size());
  for (std::size_t i = 0; i < qubit_grid_hz.size(); ++i) {
    SweepRow row;
    row.freq_hz = qubit_grid_hz[i];
    ReadoutSystem point = sys;
    point.omega_q = hz_to_rad(qubit_grid_hz[i]);
    const double t1 = 1.0 / jc_purcell_rate(point);
    row.t1_unfiltered_s = t1;
    if (re_zext_q[i] && std::isfinite(*re_zext_q[i]) && *re_zext_q[i] >= 0.0) {
      const double factor = *re_zext_q[i] / re_zext_r;
      row.re_zext_ohm = re_zext_q[i];
      row.filter_factor = factor;
      // An exactly lossless environment at omega_q blocks Purcell decay entirely.
      row.t1_filtered_s = factor > 0.0 ? t1 / factor : std::numeric_limits<double>::infinity();
    }
    out.rows.push_back(row);
  }
  return out;
}

SweepResult filtered_t1_spectrum(const ReadoutSystem& sys, const ImpedanceFn& zext,
                                 std::span<const double> qubit_grid_hz) {
  ReadoutSystem checked = sys;
  checked.omega_q = checked.omega_r;
  validate(checked);
  const auto re_r = usable_resistance(zext(sys.omega_r));
  if (!re_r || *re_r <= 0.0) {
    throw DomainError("Re Z_ext at the resonator frequency must be positive and finite");
  }
  std::vector<std::optional<double>> re_q;
  re_q.reserve(qubit_grid_hz.size());
  for (const double f : qubit_grid_hz) re_q.push_back(usable_resistance(zext(hz_to_rad(f))));
  return filtered_t1_from_resistance(checked, qubit_grid_hz, re_q, *re_r);
}

}  // namespace mechpf
