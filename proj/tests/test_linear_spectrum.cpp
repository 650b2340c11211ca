#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spincav/linear_spectrum.hpp"

using namespace spincav;

namespace {
TwoLevelSystemParams paper_params(double g_mhz) {
  TwoLevelSystemParams p;
  p.g = AngularFrequency::from_megahertz(g_mhz);
  p.kappa = AngularFrequency::from_megahertz(7.25);
  p.kappa0 = AngularFrequency::from_megahertz(7.25 / 1.9106);
  p.gamma = AngularFrequency::from_megahertz(3.035);
  p.delta_c = AngularFrequency::from_rad_per_us(0.0);
  return p;
}

// golden-section minimizer for the refinement checks
double minimize(double lo, double hi, const TwoLevelSystemParams& p) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (reflectance(c, p) < reflectance(d, p)) {
      b = d;
    } else {
      a = c;
    }
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  return 0.5 * (a + b);
}
}  // namespace

TEST_CASE("dressed eigenfrequencies") {
  const double g = AngularFrequency::from_megahertz(15.0).rad_per_us();
  SUBCASE("resonant splitting is 2g") {
    const auto [hi, lo] = eigenfrequencies_two_level(g, 0.0);
    CHECK(hi == doctest::Approx(g));
    CHECK(lo == doctest::Approx(-g));
  }
  SUBCASE("g = 0 leaves the bare resonances") {
    const double dc = 12.3;
    const auto [hi, lo] = eigenfrequencies_two_level(0.0, dc);
    CHECK(hi == doctest::Approx(dc));
    CHECK(lo == doctest::Approx(0.0));
  }
  SUBCASE("full degeneracy") {
    const auto [hi, lo] = eigenfrequencies_two_level(0.0, 0.0);
    CHECK(hi == 0.0);
    CHECK(lo == 0.0);
  }
}

TEST_CASE("impedance matching nulls the empty-cavity reflection") {
  auto p = paper_params(0.0);
  p.kappa0 = AngularFrequency::from_rad_per_us(0.5 * p.kappa.rad_per_us());
  CHECK(reflectance(0.0, p) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("empty cavity on resonance with the measured coupling ratio") {
  auto p = paper_params(0.0);
  p.kappa0 =
      AngularFrequency::from_rad_per_us(p.kappa.rad_per_us() / 1.91);
  const double expected = std::pow(1.0 - 2.0 / 1.91, 2.0);
  CHECK(reflectance(0.0, p) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(expected == doctest::Approx(0.0022).epsilon(0.02));
}

TEST_CASE("reflectance minima sit at the dressed frequencies") {
  const auto p = paper_params(15.0);
  const double g = p.g.rad_per_us();
  const double gamma = p.gamma.rad_per_us();
  const double left = minimize(-1.5 * g, -0.5 * g, p);
  const double right = minimize(0.5 * g, 1.5 * g, p);
  const auto [hi, lo] = eigenfrequencies_two_level(g, 0.0);
  CHECK(std::abs(left - lo) < 0.5 * gamma);
  CHECK(std::abs(right - hi) < 0.5 * gamma);
  CHECK(right - left == doctest::Approx(2.0 * g).epsilon(0.03));
}

TEST_CASE("curve values stay within [0,1] and mirror symmetric at Dc=0") {
  const auto p = paper_params(15.0);
  const auto grid = default_probe_grid();
  const auto curve = reflectance_curve(grid, p);
  REQUIRE(curve.reflectance.size() == grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    CHECK(curve.reflectance[i] >= -1e-9);
    CHECK(curve.reflectance[i] <= 1.0 + 1e-9);
    const double mirrored = reflectance(-grid[i], p);
    CHECK(std::abs(curve.reflectance[i] - mirrored) < 1e-10);
  }
}

TEST_CASE("weak and strong coupling limits") {
  SUBCASE("g -> 0 recovers the bare cavity dip") {
    auto with = paper_params(1e-6);
    auto empty = paper_params(0.0);
    for (double x : {-30.0, -3.0, 0.0, 1.0, 17.0}) {
      CHECK(reflectance(x, with) ==
            doctest::Approx(reflectance(x, empty)).epsilon(1e-6));
    }
  }
  SUBCASE("g -> infinity pushes the on-resonance reflectance to 1") {
    auto p = paper_params(1.5e4);
    CHECK(reflectance(0.0, p) > 0.999);
  }
}

TEST_CASE("strong coupling yields exactly two local minima over +-3g") {
  const auto p = paper_params(15.0);
  const double g = p.g.rad_per_us();
  const Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(1201, -3.0 * g, 3.0 * g);
  const auto curve = reflectance_curve(grid, p);
  int minima = 0;
  for (Eigen::Index i = 1; i + 1 < grid.size(); ++i) {
    if (curve.reflectance[i] < curve.reflectance[i - 1] &&
        curve.reflectance[i] < curve.reflectance[i + 1]) {
      ++minima;
    }
  }
  CHECK(minima == 2);
}

TEST_CASE("parameter validation") {
  auto p = paper_params(15.0);
  p.kappa0 = AngularFrequency::from_rad_per_us(0.0);
  CHECK_THROWS_AS(reflectance_curve(default_probe_grid(), p), DomainError);
  p = paper_params(15.0);
  p.kappa = AngularFrequency::from_rad_per_us(0.5 * p.kappa0.rad_per_us());
  CHECK_THROWS_AS(reflectance_curve(default_probe_grid(), p), DomainError);
}
