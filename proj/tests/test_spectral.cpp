#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fdisp/error.hpp"
#include "fdisp/fit.hpp"
#include "fdisp/fourier.hpp"
#include "fdisp/resample.hpp"

using namespace fdisp;
using std::numbers::pi;

namespace {

double max_diff(const RealField& a, const RealField& b) {
  return max_abs(a - b);
}

}  // namespace

TEST_CASE("fractional power acts on single modes by |k|^s") {
  const GridSpec g = GridSpec::square(32, 2 * pi);
  const RealField f = RealField::from_function(
      g, [](const Point& x) { return std::cos(3 * x[0]) + std::sin(2 * x[1]); });
  for (double s : {0.5, 1.0, 1.5, 2.0}) {
    const RealField expect = RealField::from_function(g, [s](const Point& x) {
      return std::pow(3.0, s) * std::cos(3 * x[0]) +
             std::pow(2.0, s) * std::sin(2 * x[1]);
    });
    CHECK(max_diff(fractional_power(f, s), expect) < 1e-11);
  }
}

TEST_CASE("dispersion operator on cos(2 x1)") {
  const GridSpec g = GridSpec::line(64, 2 * pi);
  const RealField f =
      RealField::from_function(g, [](const Point& x) { return std::cos(2 * x[0]); });
  for (double a : {1.0, 1.5, 2.0}) {
    const RealField expect = RealField::from_function(g, [a](const Point& x) {
      return -2.0 * std::pow(2.0, a) * std::sin(2 * x[0]);
    });
    CHECK(max_diff(dispersion_apply(f, a), expect) < 1e-11);
  }
  CHECK_THROWS_AS(dispersion_apply(f, 0.5), ValidationError);
}

TEST_CASE("Riesz transform of a plane wave") {
  const GridSpec g = GridSpec::square(32, 2 * pi);
  const RealField f = RealField::from_function(
      g, [](const Point& x) { return std::cos(x[0] + x[1]); });
  const RealField expect = RealField::from_function(g, [](const Point& x) {
    return std::sin(x[0] + x[1]) / std::sqrt(2.0);
  });
  CHECK(max_diff(riesz_transform(f, Axis::x1), expect) < 1e-13);
  CHECK(max_diff(riesz_transform(f, Axis::x2), expect) < 1e-13);
}

TEST_CASE("Parseval and Sobolev norms of a cosine") {
  const GridSpec g = GridSpec::line(64, 2 * pi);
  const RealField f =
      RealField::from_function(g, [](const Point& x) { return std::cos(3 * x[0]); });
  CHECK(l2_norm_squared(f) == doctest::Approx(pi).epsilon(1e-13));
  CHECK(spectral_norm_squared(forward_transform(f)) ==
        doctest::Approx(pi).epsilon(1e-13));
  CHECK(sobolev_half_norm_squared(f) ==
        doctest::Approx(pi * std::sqrt(10.0)).epsilon(1e-13));
  CHECK(homogeneous_half_energy(f, 1.5) ==
        doctest::Approx(pi * std::pow(3.0, 1.5)).epsilon(1e-13));
  CHECK(std::abs(mean(f)) < 1e-15);
}

TEST_CASE("two-thirds rule keeps 3|m| < N") {
  const GridSpec g = GridSpec::line(32, 2 * pi);
  const RealField keep =
      RealField::from_function(g, [](const Point& x) { return std::cos(10 * x[0]); });
  const RealField drop =
      RealField::from_function(g, [](const Point& x) { return std::cos(11 * x[0]); });
  CHECK(max_diff(dealias(keep), keep) < 1e-13);
  CHECK(max_abs(dealias(drop)) < 1e-13);
}

TEST_CASE("translation and affine resampling") {
  const GridSpec g = GridSpec::square(32, 2 * pi);
  const RealField f = RealField::from_function(
      g, [](const Point& x) { return std::cos(x[0]) * std::sin(2 * x[1]); });
  const RealField moved = translate(f, {0.37, -1.2});
  const RealField expect = RealField::from_function(g, [](const Point& x) {
    return std::cos(x[0] - 0.37) * std::sin(2 * (x[1] + 1.2));
  });
  CHECK(max_diff(moved, expect) < 1e-12);

  const GridSpec h = GridSpec::square(128, 24.0);
  const RealField gauss = RealField::from_function(h, [](const Point& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  const RealField scaled = affine_resample(gauss, 1.5, {0.4, 0.0}, Outside::zero);
  const RealField direct = RealField::from_function(h, [](const Point& x) {
    const double a = 1.5 * x[0] + 0.4;
    const double b = 1.5 * x[1];
    return std::exp(-(a * a + b * b));
  });
  CHECK(max_diff(scaled, direct) < 1e-10);
}

TEST_CASE("least-squares helpers") {
  const std::vector<double> x{1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -2.0));
  CHECK(loglog_slope(x, y) == doctest::Approx(-2.0).epsilon(1e-12));
  const std::vector<double> ly{1, 3, 7, 15};
  const LineFit lf = fit_line(x, ly);
  CHECK(lf.slope == doctest::Approx(2.0));
  CHECK(lf.intercept == doctest::Approx(-1.0));
}
