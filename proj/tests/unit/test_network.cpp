#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <random>

#include "mechpf/errors.hpp"
#include "mechpf/network.hpp"
#include "oracles.hpp"

using namespace mechpf;

namespace {

constexpr double kTwoPiTest = 2.0 * std::numbers::pi;

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return g;
}

double max_abs(const Eigen::Matrix2cd& m) { return m.cwiseAbs().maxCoeff(); }

LadderFilterSpec matched_ladder(double k2) {
  LadderFilterSpec s = oracle::reference_ladder(Quality::finite(800));
  s.series.k2 = k2;
  s.shunt.k2 = k2;
  const double x = 8.0 * k2 / (std::numbers::pi * std::numbers::pi);
  s.shunt.omega_m = s.series.omega_m / std::sqrt(1.0 + x);
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("network");

TEST_CASE("series and shunt chain matrices") {
  CHECK(max_abs(abcd_series(0.0).m - Eigen::Matrix2cd::Identity()) == 0.0);
  CHECK(max_abs(abcd_shunt(0.0).m - Eigen::Matrix2cd::Identity()) == 0.0);
  const Complex z1{3.0, -2.0}, z2{0.5, 7.0};
  CHECK(std::abs(abcd_series(z1).m.determinant() - 1.0) < 1e-15);
  CHECK(std::abs(abcd_shunt(z2).m.determinant() - 1.0) < 1e-15);
  CHECK(max_abs((abcd_series(z1) * abcd_series(z2)).m - abcd_series(z1 + z2).m) < 1e-15);
  CHECK(max_abs((abcd_shunt(z1) * abcd_shunt(z2)).m - abcd_shunt(z1 + z2).m) < 1e-15);
  CHECK(abcd_series(Complex{0.0, INFINITY}).pole_order == 1);
}

TEST_CASE("chain to scattering conversion") {
  const auto through = abcd_to_s(ChainMatrix{}, 50.0);
  REQUIRE(through);
  CHECK(std::abs((*through)(0, 0)) == 0.0);
  CHECK(std::abs((*through)(1, 0) - 1.0) == 0.0);
  const auto s = abcd_to_s(abcd_series(50.0), 50.0);
  REQUIRE(s);
  CHECK(std::abs((*s)(0, 0) - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs((*s)(1, 0) - (*s)(0, 1)) < 1e-15);
  const auto open = abcd_to_s(abcd_series(Complex{0.0, INFINITY}), 50.0);
  REQUIRE(open);
  CHECK(std::abs((*open)(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs((*open)(1, 0)) == 0.0);
}

TEST_CASE("ladder agrees with nodal analysis of the expanded circuit") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    auto spec = trial == 0 ? oracle::reference_ladder(Quality::finite(800))
                           : oracle::random_ladder(rng, false);
    const auto freqs = grid(2.0e9, 5.0e9, 37);
    const auto s = abcd_to_s(build_ladder(spec, freqs));
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      const auto ref = oracle::ladder_by_nodal_analysis(spec, kTwoPiTest * freqs[i]);
      REQUIRE(s[i]);
      CHECK(std::abs((*s[i])(0, 0) - ref.s11) < 1e-8);
      CHECK(std::abs((*s[i])(1, 0) - ref.s21) < 1e-8);
    }
  }
}

TEST_CASE("order one ladder passes the resonance and blocks the antiresonance") {
  LadderFilterSpec spec = oracle::reference_ladder(Quality::finite(800));
  spec.order = 1;
  const auto freqs = grid(2.9e9, 3.5e9, 6001);
  const auto il = insertion_loss_db(build_ladder(spec, freqs));
  std::size_t worst = 0;
  for (std::size_t i = 0; i < il.size(); ++i) {
    if (*il[i] > *il[worst]) worst = i;
  }
  const double f_a = resonance_antiresonance(bvd_from_specs(spec.series)).f_a;
  CHECK(std::abs(freqs[worst] - f_a) <= 0.2e6);
  CHECK(*il[2800] < 0.2);
}

TEST_CASE("reference ladder is a bandpass with zeros on both sides") {
  const auto spec = oracle::reference_ladder(Quality::finite(800));
  CHECK(design_rule_warnings(spec).empty());
  const auto freqs = grid(2.8e9, 3.6e9, 8001);
  const auto net = build_ladder(spec, freqs);
  const auto bw = bandwidth(net, 3.0);
  REQUIRE(bw);
  CHECK(bw->lower_hz < 3.18e9);
  CHECK(bw->upper_hz > 3.18e9);
  CHECK(bw->width_hz > 100e6);
  CHECK(bw->width_hz < 300e6);
  const auto il = insertion_loss_db(net);
  const auto at = [&](double f) {
    return *il[static_cast<std::size_t>(std::lround((f - 2.8e9) / 0.1e6))];
  };
  const double shunt_zero = at(3.00e9);
  const double series_zero =
      at(std::round(resonance_antiresonance(bvd_from_specs(spec.series)).f_a / 0.1e6) * 0.1e6);
  CHECK(shunt_zero > 30.0);
  CHECK(series_zero > 30.0);
  CHECK(at(3.10e9) < 3.0);
}

TEST_CASE("bandwidth agrees with a nodal-analysis grid search") {
  const auto spec = oracle::reference_ladder(Quality::finite(800));
  const auto freqs = grid(2.8e9, 3.6e9, 4001);
  const double step = freqs[1] - freqs[0];
  std::vector<double> mag(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    mag[i] = std::abs(oracle::ladder_by_nodal_analysis(spec, kTwoPiTest * freqs[i]).s21);
  }
  std::size_t peak = 0;
  for (std::size_t i = 0; i < mag.size(); ++i) {
    if (mag[i] > mag[peak]) peak = i;
  }
  const double level = mag[peak] * std::pow(10.0, -3.0 / 20.0);
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && mag[lo - 1] >= level) --lo;
  while (hi + 1 < mag.size() && mag[hi + 1] >= level) ++hi;
  const auto bw = bandwidth(build_ladder(spec, freqs), 3.0);
  REQUIRE(bw);
  CHECK(std::abs(bw->width_hz - (freqs[hi] - freqs[lo])) <= 2.0 * step);
  CHECK(bw->resolution_hz == doctest::Approx(step));
}

TEST_CASE("weaker coupling narrows the passband") {
  const auto freqs = grid(2.5e9, 3.6e9, 4401);
  double previous = 0.0;
  for (const double k2 : {0.01, 0.02, 0.03, 0.04, 0.05, 0.06}) {
    const auto bw = bandwidth(build_ladder(matched_ladder(k2), freqs), 3.0);
    REQUIRE(bw);
    CHECK(bw->width_hz > previous);
    previous = bw->width_hz;
  }
}

TEST_CASE("vanishing coupling blocks transmission off resonance") {
  auto spec = oracle::reference_ladder(Quality::finite(800));
  spec.series.k2 = 1e-7;
  spec.shunt.k2 = 1e-7;
  const auto freqs = grid(2.5e9, 3.6e9, 111);
  for (const auto& s : abcd_to_s(build_ladder(spec, freqs))) {
    REQUIRE(s);
    CHECK(std::abs((*s)(1, 0)) < 0.2);
  }
}

TEST_CASE("matched through has zero loss and full-span bandwidth") {
  const std::vector<double> freqs = grid(1e9, 2e9, 11);
  const TwoPortNetwork net(freqs, std::vector<ChainMatrix>(freqs.size()), 50.0);
  for (const auto& il : insertion_loss_db(net)) CHECK(*il == doctest::Approx(0.0));
  const auto bw = bandwidth(net, 3.0);
  REQUIRE(bw);
  CHECK(bw->width_hz == doctest::Approx(1e9));
}

TEST_CASE("network validation") {
  const std::vector<ChainMatrix> one(1);
  CHECK_THROWS_AS(TwoPortNetwork({}, {}, 50.0), DomainError);
  CHECK_THROWS_AS(TwoPortNetwork({1e9}, one, 0.0), DomainError);
  CHECK_THROWS_AS(TwoPortNetwork({-1.0}, one, 50.0), DomainError);
  CHECK_THROWS_AS(TwoPortNetwork({2e9, 1e9}, std::vector<ChainMatrix>(2), 50.0), DomainError);
  const auto spec = oracle::reference_ladder(Quality::finite(800));
  CHECK_THROWS_AS(build_ladder(spec, std::vector<double>{}), DomainError);
  auto bad = spec;
  bad.order = 0;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = spec;
  bad.shunt_multiplicity = 0;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = spec;
  bad.shunt.omega_m *= 0.95;
  CHECK_FALSE(design_rule_warnings(bad).empty());
}

TEST_CASE("random ladders are reciprocal, passive and fold-order independent") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const bool lossless = trial % 3 == 0;
    const auto spec = oracle::random_ladder(rng, lossless);
    const auto freqs = grid(1.5e9, 6e9, 25);
    const auto net = build_ladder(spec, freqs);
    const auto s = abcd_to_s(net);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      const auto& c = net.chain()[i];
      if (c.is_finite()) {
        // Entries grow without bound in deep stopbands; compare at the scale of the products.
        const double scale =
            std::abs(c.m(0, 0) * c.m(1, 1)) + std::abs(c.m(0, 1) * c.m(1, 0));
        CHECK(std::abs(c.m.determinant() - 1.0) < 1e-9 * std::max(1.0, scale));
      }
      REQUIRE(s[i]);
      const double power = std::norm((*s[i])(0, 0)) + std::norm((*s[i])(1, 0));
      CHECK(power <= 1.0 + 1e-9);
      if (lossless) CHECK(std::abs(power - 1.0) < 1e-9);
      CHECK((*s[i])(1, 0) == (*s[i])(0, 1));

      const auto elements = ladder_elements(spec, kTwoPiTest * freqs[i]);
      ChainMatrix right;
      for (auto it = elements.rbegin(); it != elements.rend(); ++it) right = *it * right;
      CHECK(right.pole_order == c.pole_order);
      CHECK(max_abs(right.m - c.m) <= 1e-12 * max_abs(c.m));
    }
  }
}

TEST_CASE("lossless reference ladder has exact transmission zeros") {
  const auto spec = oracle::reference_ladder(Quality::unbounded());
  const double f_p = spec.shunt.omega_m / kTwoPiTest;
  const double f_a = resonance_antiresonance(bvd_from_specs(spec.series)).f_a;
  const auto s = abcd_to_s(build_ladder(spec, std::vector<double>{f_p, f_a}));
  REQUIRE(s[0]);
  REQUIRE(s[1]);
  CHECK(std::abs((*s[0])(1, 0)) < 1e-6);
  CHECK(std::abs((*s[1])(1, 0)) < 1e-6);
}

TEST_CASE("resistance seen through a reflection") {
  CHECK(re_zext_from_s11(0.0, 50.0).ohms == 50.0);
  CHECK(re_zext_from_s11(-1.0, 50.0).ohms == 0.0);
  CHECK(re_zext_from_s11(1.0, 50.0).status == ResistanceStatus::unbounded);
  CHECK(std::isinf(re_zext_from_s11(1.0, 50.0).ohms));
  CHECK(re_zext_from_s11(1.0 + 1e-7, 50.0).ohms == 0.0);
  CHECK(re_zext_from_s11(1.0 + 1e-7, 50.0).ok());
  CHECK(re_zext_from_s11(Complex{0.0, 1.01}, 50.0).status == ResistanceStatus::non_passive);
}

TEST_CASE("extracted resistance equals the terminated input impedance") {
  const auto spec = oracle::reference_ladder(Quality::finite(800));
  const auto freqs = grid(2.5e9, 3.8e9, 1301);
  const auto net = build_ladder(spec, freqs);
  const auto s = abcd_to_s(net);
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double r = re_zext_from_s11((*s[i])(0, 0), 50.0).ohms;
    const Complex z = oracle::ladder_by_nodal_analysis(spec, kTwoPiTest * freqs[i]).z_in;
    CHECK(std::abs(r - z.real()) <= 1e-6 * std::max(z.real(), 1e-3));
    const auto zin = input_impedance(net.chain()[i], 50.0);
    REQUIRE(zin);
    CHECK(std::abs(r - zin->real()) <= 1e-6 * std::max(zin->real(), 1e-3));
    if (std::abs(freqs[i] - 3.18e9) < 60e6) {
      CHECK(r > 25.0);
      CHECK(r < 150.0);
    }
    if (freqs[i] < 2.7e9) CHECK(r < 2.0);
  }
}

TEST_SUITE_END();
