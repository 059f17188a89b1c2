#include "mechpf/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "least_squares.hpp"
#include "mechpf/errors.hpp"

namespace mechpf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ParameterLayout {
  std::vector<std::string> names;
  Eigen::VectorXd x0;  // log values
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

using ModelFn = std::function<std::vector<Complex>(const Eigen::VectorXd&)>;

void add_parameter(ParameterLayout& layout, std::string name, double value, double upper_cap,
                   const std::vector<ParameterBound>& overrides) {
  double lo = value / 4.0;
  double hi = std::min(value * 4.0, upper_cap);
  for (const auto& b : overrides) {
    if (b.name != name) continue;
    lo = b.lower;
    hi = b.upper;
  }
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw DomainError("invalid bounds for parameter " + name);
  }
  if (value < lo || value > hi) {
    throw DomainError("initial value of " + name + " lies outside its bounds");
  }
  const auto n = layout.x0.size();
  layout.names.push_back(std::move(name));
  layout.x0.conservativeResize(n + 1);
  layout.lower.conservativeResize(n + 1);
  layout.upper.conservativeResize(n + 1);
  layout.x0(n) = std::log(value);
  layout.lower(n) = std::log(lo);
  layout.upper(n) = std::log(hi);
}

void check_overrides(const ParameterLayout& layout, const std::vector<ParameterBound>& overrides) {
  for (const auto& b : overrides) {
    if (std::find(layout.names.begin(), layout.names.end(), b.name) == layout.names.end()) {
      throw DomainError("bounds given for unknown parameter " + b.name);
    }
  }
}

void check_problem(const FitProblem& p) {
  if (p.freqs_hz.empty()) throw DomainError("fit problem has an empty frequency grid");
  if (p.freqs_hz.size() != p.target.size()) {
    throw DomainError("fit target and frequency grid differ in length");
  }
  for (std::size_t i = 0; i < p.freqs_hz.size(); ++i) {
    if (!(p.freqs_hz[i] > 0.0) || (i > 0 && !(p.freqs_hz[i] > p.freqs_hz[i - 1]))) {
      throw DomainError("fit frequencies must be positive and strictly increasing");
    }
    if (!std::isfinite(p.target[i].real()) || !std::isfinite(p.target[i].imag())) {
      throw DomainError("fit target contains non-finite values");
    }
  }
  if (!p.weights.empty()) {
    if (p.weights.size() != p.freqs_hz.size()) {
      throw DomainError("fit weights and frequency grid differ in length");
    }
    bool any = false;
    for (const double w : p.weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("fit weights must be non-negative");
      any = any || w > 0.0;
    }
    if (!any) throw DomainError("fit weights are all zero");
  }
  if (p.options.max_iterations < 0) throw DomainError("max_iterations must be non-negative");
}

double weight_at(const FitProblem& p, std::size_t i) {
  return p.weights.empty() ? 1.0 : p.weights[i];
}

double weighted_rms(const FitProblem& p, const std::vector<Complex>& values,
                    const std::vector<Complex>* reference) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weight_at(p, i);
    double d2;
    if (reference == nullptr) {
      d2 = std::norm(values[i]);
    } else if (p.options.magnitude_only) {
      const double d = std::abs(values[i]) - std::abs((*reference)[i]);
      d2 = d * d;
    } else {
      d2 = std::norm(values[i] - (*reference)[i]);
    }
    num += w * d2;
    den += w;
  }
  return std::sqrt(num / den);
}

/// Residual vector normalized by the weighted RMS of the target.
Eigen::VectorXd stacked_residual(const FitProblem& p, const std::vector<Complex>& model,
                                 double scale) {
  const bool mag = p.options.magnitude_only;
  std::size_t active = 0;
  for (std::size_t i = 0; i < model.size(); ++i) active += weight_at(p, i) > 0.0 ? 1 : 0;
  Eigen::VectorXd r(static_cast<Eigen::Index>(active * (mag ? 1 : 2)));
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double w = weight_at(p, i);
    if (w <= 0.0) continue;
    const double sw = std::sqrt(w) / scale;
    if (mag) {
      r(k++) = sw * (std::abs(model[i]) - std::abs(p.target[i]));
    } else {
      const Complex d = model[i] - p.target[i];
      r(k++) = sw * d.real();
      r(k++) = sw * d.imag();
    }
  }
  return r;
}

struct Outcome {
  Eigen::VectorXd x;
  FitReport report;
};

/// Runs LM from the best of the candidate starting points and fills the
/// generic parts of the report.
Outcome run_fit(const FitProblem& p, const ParameterLayout& layout, const ModelFn& model,
                const std::vector<Eigen::VectorXd>& starts) {
  double target_scale = weighted_rms(p, p.target, nullptr);
  if (!(target_scale > 0.0)) target_scale = 1.0;
  const detail::ResidualFn residual = [&](const Eigen::VectorXd& x) {
    return stacked_residual(p, model(x), target_scale);
  };

  Eigen::VectorXd x0 = layout.x0;
  const Eigen::VectorXd r0 = residual(x0);
  if (!r0.allFinite()) throw NumericalError("model residual is not finite at the initial guess");
  double best = r0.squaredNorm();
  for (const auto& start : starts) {
    const Eigen::VectorXd clamped = start.cwiseMax(layout.lower).cwiseMin(layout.upper);
    const Eigen::VectorXd r = residual(clamped);
    if (!r.allFinite()) continue;
    if (r.squaredNorm() < best) {
      best = r.squaredNorm();
      x0 = clamped;
    }
  }

  detail::LeastSquaresOptions lso;
  lso.max_iterations = p.options.max_iterations;
  const auto lm = detail::levenberg_marquardt(residual, x0, layout.lower, layout.upper, lso);

  Outcome out;
  out.x = lm.x;
  FitReport& rep = out.report;
  rep.iterations = lm.iterations;
  switch (lm.status) {
    case detail::LeastSquaresStatus::converged: rep.status = FitStatus::converged; break;
    case detail::LeastSquaresStatus::max_iterations: rep.status = FitStatus::max_iterations; break;
    case detail::LeastSquaresStatus::stalled: rep.status = FitStatus::stalled; break;
  }

  double weight_sum = 0.0;
  for (std::size_t i = 0; i < p.freqs_hz.size(); ++i) weight_sum += weight_at(p, i);
  for (const double cost : lm.cost_history) {
    rep.residual_history.push_back(target_scale * std::sqrt(2.0 * cost / weight_sum));
  }
  const auto fitted = model(lm.x);
  rep.residual_rms = weighted_rms(p, fitted, &p.target);
  rep.relative_residual = rep.residual_rms / weighted_rms(p, p.target, nullptr);

  // Covariance of the log parameters from the Gauss-Newton Hessian.
  const Eigen::Index m = lm.residual.size();
  const Eigen::Index n = lm.x.size();
  Eigen::VectorXd sigma_log = Eigen::VectorXd::Constant(n, kNaN);
  if (m > n) {
    const Eigen::MatrixXd jtj = lm.jacobian.transpose() * lm.jacobian;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(jtj);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(n, n));
      const double s2 = lm.residual.squaredNorm() / static_cast<double>(m - n);
      for (Eigen::Index j = 0; j < n; ++j) sigma_log(j) = std::sqrt(std::max(cov(j, j), 0.0) * s2);
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const double value = std::exp(lm.x(j));
    rep.parameters.push_back({layout.names[static_cast<std::size_t>(j)], value,
                              value * sigma_log(j)});
  }

  if (rep.relative_residual > p.options.mismatch_threshold) {
    rep.model_mismatch = true;
    rep.warnings.push_back("relative residual " + std::to_string(rep.relative_residual) +
                           " exceeds the model-mismatch threshold " +
                           std::to_string(p.options.mismatch_threshold));
  }
  if (rep.status != FitStatus::converged) {
    rep.warnings.push_back("fit ended with status " + to_string(rep.status));
  }
  return out;
}

std::vector<double> magnitudes(const std::vector<Complex>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](Complex z) { return std::abs(z); });
  return out;
}

std::size_t argmax(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo; i < hi; ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

std::size_t argmin(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo; i < hi; ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

double coupling_from_pair(double f_r, double f_a) {
  const double x = (f_a / f_r) * (f_a / f_r) - 1.0;
  return std::min(kCouplingScale * x, 0.99 * kMaxCoupling);
}

/// Resonance/antiresonance read off the target's magnitude features.
std::optional<ResonancePair> resonator_features(const FitProblem& p) {
  auto mag = magnitudes(p.target);
  if (p.kind == ObservableKind::s11) {
    for (auto& m : mag) m = -m;  // S11 of a series element dips at resonance
  }
  const std::size_t n = mag.size();
  const std::size_t peak = argmax(mag, 0, n);
  if (peak + 1 >= n) return std::nullopt;
  const std::size_t zero = argmin(mag, peak + 1, n);
  if (!(p.freqs_hz[zero] > p.freqs_hz[peak])) return std::nullopt;
  return ResonancePair{p.freqs_hz[peak], p.freqs_hz[zero]};
}

}  // namespace

const FitParameter& FitReport::parameter(const std::string& name) const {
  for (const auto& prm : parameters) {
    if (prm.name == name) return prm;
  }
  throw std::out_of_range("no fit parameter named " + name);
}

std::vector<Complex> resonator_response(const ResonatorSpec& spec, ObservableKind kind,
                                        std::span<const double> freqs_hz, double z0) {
  std::vector<Complex> out;
  out.reserve(freqs_hz.size());
  if (kind == ObservableKind::admittance) {
    const BvdResonator res = bvd_from_specs(spec);
    for (const double f : freqs_hz) {
      const Complex y = admittance(res, hz_to_rad(f));
      out.push_back(is_pole(y) ? Complex{kNaN, kNaN} : y);
    }
    return out;
  }
  LadderFilterSpec single;
  single.order = 1;
  single.series = spec;
  single.shunt = spec;
  single.shunt_multiplicity = 1;
  single.z0 = z0;
  return ladder_response(single, kind, freqs_hz);
}

std::vector<Complex> ladder_response(const LadderFilterSpec& spec, ObservableKind kind,
                                     std::span<const double> freqs_hz) {
  if (kind == ObservableKind::admittance) {
    throw DomainError("ladder fits support only s11 and s21 observables");
  }
  const auto s = abcd_to_s(build_ladder(spec, freqs_hz));
  std::vector<Complex> out;
  out.reserve(s.size());
  for (const auto& sm : s) {
    if (!sm) {
      out.emplace_back(kNaN, kNaN);
    } else {
      out.push_back(kind == ObservableKind::s11 ? (*sm)(0, 0) : (*sm)(1, 0));
    }
  }
  return out;
}

FitReport fit_bvd(const FitProblem& p) {
  check_problem(p);
  const auto* initial = std::get_if<ResonatorSpec>(&p.initial);
  if (initial == nullptr) throw DomainError("fit_bvd needs a ResonatorSpec initial guess");
  validate(*initial);
  if (p.kind != ObservableKind::admittance && !(p.z0 > 0.0)) {
    throw DomainError("fit_bvd needs a positive port impedance");
  }

  const bool fit_q = !initial->q.is_unbounded();
  ParameterLayout layout;
  add_parameter(layout, "f_m", rad_to_hz(initial->omega_m), HUGE_VAL, p.bounds);
  add_parameter(layout, "k2", initial->k2, 0.999 * kMaxCoupling, p.bounds);
  if (fit_q) add_parameter(layout, "q", initial->q.value(), HUGE_VAL, p.bounds);
  add_parameter(layout, "c_g", initial->c_g, HUGE_VAL, p.bounds);
  check_overrides(layout, p.bounds);

  const auto spec_of = [&](const Eigen::VectorXd& x) {
    ResonatorSpec s = *initial;
    Eigen::Index k = 0;
    s.omega_m = hz_to_rad(std::exp(x(k++)));
    s.k2 = std::exp(x(k++));
    if (fit_q) s.q = Quality::finite(std::exp(x(k++)));
    s.c_g = std::exp(x(k++));
    return s;
  };
  const ModelFn model = [&](const Eigen::VectorXd& x) {
    return resonator_response(spec_of(x), p.kind, p.freqs_hz, p.z0);
  };

  std::vector<Eigen::VectorXd> starts;
  if (const auto features = resonator_features(p)) {
    Eigen::VectorXd seeded = layout.x0;
    seeded(0) = std::log(features->f_r);
    seeded(1) = std::log(coupling_from_pair(features->f_r, features->f_a));
    starts.push_back(seeded);
  }

  Outcome out = run_fit(p, layout, model, starts);
  out.report.resonator = spec_of(out.x);
  return out.report;
}

FitReport fit_ladder(const FitProblem& p) {
  check_problem(p);
  const auto* initial = std::get_if<LadderFilterSpec>(&p.initial);
  if (initial == nullptr) throw DomainError("fit_ladder needs a LadderFilterSpec initial guess");
  validate(*initial);
  if (p.kind == ObservableKind::admittance) {
    throw DomainError("ladder fits support only s11 and s21 observables");
  }

  const bool fit_qs = !initial->series.q.is_unbounded();
  const bool fit_qp = !initial->shunt.q.is_unbounded();
  ParameterLayout layout;
  add_parameter(layout, "f_series", rad_to_hz(initial->series.omega_m), HUGE_VAL, p.bounds);
  add_parameter(layout, "f_shunt", rad_to_hz(initial->shunt.omega_m), HUGE_VAL, p.bounds);
  add_parameter(layout, "k2_series", initial->series.k2, 0.999 * kMaxCoupling, p.bounds);
  add_parameter(layout, "k2_shunt", initial->shunt.k2, 0.999 * kMaxCoupling, p.bounds);
  if (fit_qs) add_parameter(layout, "q_series", initial->series.q.value(), HUGE_VAL, p.bounds);
  if (fit_qp) add_parameter(layout, "q_shunt", initial->shunt.q.value(), HUGE_VAL, p.bounds);
  add_parameter(layout, "c_g_scale", 1.0, HUGE_VAL, p.bounds);
  check_overrides(layout, p.bounds);

  const auto spec_of = [&](const Eigen::VectorXd& x) {
    LadderFilterSpec s = *initial;
    Eigen::Index k = 0;
    s.series.omega_m = hz_to_rad(std::exp(x(k++)));
    s.shunt.omega_m = hz_to_rad(std::exp(x(k++)));
    s.series.k2 = std::exp(x(k++));
    s.shunt.k2 = std::exp(x(k++));
    if (fit_qs) s.series.q = Quality::finite(std::exp(x(k++)));
    if (fit_qp) s.shunt.q = Quality::finite(std::exp(x(k++)));
    const double scale = std::exp(x(k++));
    s.series.c_g = initial->series.c_g * scale;
    s.shunt.c_g = initial->shunt.c_g * scale;
    return s;
  };
  const ModelFn model = [&](const Eigen::VectorXd& x) {
    return ladder_response(spec_of(x), p.kind, p.freqs_hz);
  };

  // Seeds from the transmission features: passband center ~ series
  // resonance, lower zero = shunt resonance, upper zero = series antiresonance.
  std::vector<Eigen::VectorXd> starts;
  if (p.kind == ObservableKind::s21 && initial->order > 1) {
    const auto mag = magnitudes(p.target);
    const std::size_t n = mag.size();
    const std::size_t peak = argmax(mag, 0, n);
    const double level = mag[peak] / std::sqrt(2.0);
    std::size_t lo = peak;
    while (lo > 0 && mag[lo - 1] >= level) --lo;
    std::size_t hi = peak;
    while (hi + 1 < n && mag[hi + 1] >= level) ++hi;
    if (lo > 0 && hi + 1 < n) {
      const double f_center = 0.5 * (p.freqs_hz[lo] + p.freqs_hz[hi]);
      const double f_shunt = p.freqs_hz[argmin(mag, 0, lo)];
      const double f_anti = p.freqs_hz[argmin(mag, hi + 1, n)];
      if (f_anti > f_center && f_shunt < f_center) {
        Eigen::VectorXd seeded = layout.x0;
        seeded(0) = std::log(f_center);
        seeded(1) = std::log(f_shunt);
        seeded(2) = std::log(coupling_from_pair(f_center, f_anti));
        starts.push_back(seeded);
        seeded(3) = seeded(2);
        starts.push_back(seeded);
      }
    }
  }

  Outcome out = run_fit(p, layout, model, starts);
  out.report.ladder = spec_of(out.x);
  return out.report;
}

std::string to_string(FitStatus status) {
  switch (status) {
    case FitStatus::converged: return "converged";
    case FitStatus::max_iterations: return "max-iterations";
    case FitStatus::stalled: return "stalled";
  }
  return "unknown";
}

std::string to_string(ObservableKind kind) {
  switch (kind) {
    case ObservableKind::admittance: return "admittance";
    case ObservableKind::s11: return "s11";
    case ObservableKind::s21: return "s21";
  }
  return "unknown";
}

}  // namespace mechpf
