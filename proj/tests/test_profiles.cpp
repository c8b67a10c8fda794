#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "fdisp/error.hpp"
#include "fdisp/fourier.hpp"
#include "fdisp/ground_state.hpp"
#include "fdisp/linearized.hpp"
#include "fdisp/weights.hpp"

using namespace fdisp;
using boost::math::quadrature::exp_sinh;
using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::sinh_sinh;
using std::numbers::pi;

namespace {

double japanese_quadrature(double s, double gamma) {
  auto f = [gamma](double t) { return std::pow(1.0 + t * t, -gamma); };
  if (std::isinf(s)) return sinh_sinh<double>().integrate(f, 1e-14);
  const double head = exp_sinh<double>().integrate(
      f, -std::numeric_limits<double>::infinity(), 0.0, 1e-14);
  if (s == 0.0) return head;
  const double body = gauss_kronrod<double, 61>::integrate(f, 0.0, s, 20, 1e-14);
  return head + body;
}

}  // namespace

TEST_CASE("weight antiderivative against adaptive quadrature") {
  for (double gamma : {0.75, 1.0, 1.25, 1.5}) {
    for (double s : {-30.0, -2.0, -0.3, 0.0, 0.7, 5.0, 40.0})
      CHECK(japanese_antiderivative(s, gamma) ==
            doctest::Approx(japanese_quadrature(s, gamma)).epsilon(1e-9));
    CHECK(japanese_total(gamma) ==
          doctest::Approx(japanese_quadrature(
                              std::numeric_limits<double>::infinity(), gamma))
              .epsilon(1e-9));
  }
  CHECK(japanese_total(1.0) == doctest::Approx(pi));
  CHECK(japanese_total(1.5) == doctest::Approx(2.0));
}

TEST_CASE("weights: phi is the square root of the derivative of varphi") {
  WeightParams w;
  w.sigma = {0.8, 0.3};
  w.omega = 0.4;
  w.gamma = 1.25;
  w.m_scale = 2.0;
  const double h = 1e-5;
  for (double x : {-3.0, 0.0, 1.7}) {
    const Point p{x, 0.5};
    const double d =
        (varphi({x + h, 0.5}, w) - varphi({x - h, 0.5}, w)) / (2 * h);
    const double phi = phi_weight(p, w);
    CHECK(d == doctest::Approx(w.sigma[0] / w.m_scale * phi * phi).epsilon(1e-7));
  }
  w.gamma = 2.0;
  CHECK_THROWS_AS(w.validate(1.0), ValidationError);
  w.gamma = 1.5;
  CHECK_NOTHROW(w.validate(2.0));
}

TEST_CASE("cutoff profile") {
  CHECK(cutoff_profile(0.0, 4.0) == 1.0);
  CHECK(cutoff_profile(4.0, 4.0) == 1.0);
  CHECK(cutoff_profile(8.0, 4.0) == 0.0);
  CHECK(cutoff_profile(6.0, 4.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(cutoff_profile(1.0, 0.5), ValidationError);
}

TEST_CASE("scaling generator and F for a Gaussian") {
  const GridSpec g = GridSpec::square(128, 24.0);
  const RealField q = RealField::from_function(g, [](const Point& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  // Lambda q = (1 - 2|x|^2) q.
  const RealField lq = RealField::from_function(g, [](const Point& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return (1.0 - 2.0 * r2) * std::exp(-r2);
  });
  CHECK(max_abs(scaling_generator(q) - lq) < 1e-10);
  // F = x1 q - 2 x2^2 e^{-x2^2} (sqrt(pi)/2)(1 + erf x1).
  const RealField F = F_field(q);
  const RealField expect = RealField::from_function(g, [](const Point& x) {
    return x[0] * std::exp(-(x[0] * x[0] + x[1] * x[1])) -
           x[1] * x[1] * std::exp(-x[1] * x[1]) * std::sqrt(pi) *
               (1.0 + std::erf(x[0]));
  });
  CHECK(max_abs(F - expect) < 1e-9);
  // kappa = (1/2) integral (2 sqrt(pi) x2^2 e^{-x2^2})^2 dx2
  //       = 2 pi * 3 sqrt(pi/2) / 16.
  CHECK(kappa_constant(q) ==
        doctest::Approx(2 * pi * 3.0 * std::sqrt(pi / 2) / 16.0).epsilon(1e-9));
}

TEST_CASE("KdV ground state is 3 sech^2(x/2)") {
  const GridSpec g = GridSpec::line(256, 60.0);
  const GroundStateBundle b = petviashvili_solve(2.0, 1.0, g);
  const RealField exact = RealField::from_function(g, [](const Point& x) {
    const double s = 1.0 / std::cosh(0.5 * x[0]);
    return 3.0 * s * s;
  });
  CHECK(max_abs(b.Q - exact) < 1e-8);
  CHECK(b.residual_norm < 1e-9);
}

TEST_CASE("Benjamin-Ono ground state approaches 4/(1+x^2)") {
  const GridSpec g = GridSpec::line(2048, 512.0);
  const GroundStateBundle b = petviashvili_solve(1.0, 1.0, g);
  double err = 0.0;
  for (int i = 0; i < g.nx(); ++i) {
    const double x = g.coordinate(0, i);
    if (std::abs(x) <= 20.0)
      err = std::max(err, std::abs(b.Q.at(i) - 4.0 / (1.0 + x * x)));
  }
  CHECK(err < 1e-3);
  // Mass of 4/(1+x^2) is 8 pi.
  CHECK(b.mass == doctest::Approx(8 * pi).epsilon(5e-3));
}

TEST_CASE("ground state rescaling and Pohozaev balance") {
  const GridSpec g = GridSpec::line(256, 60.0);
  const GroundStateBundle b = petviashvili_solve(2.0, 1.0, g);
  const GroundStateBundle b2 = scale_ground_state(b, 2.0);
  CHECK(ground_state_residual(b2.Q, 2.0, 2.0) < 1e-7);
  CHECK(pohozaev_check(b.Q, 2.0).slack < 1e-9);
}

TEST_CASE("linearized operator around the Benjamin-Ono soliton") {
  const GridSpec g = GridSpec::line(8192, 1024.0);
  const RealField Q = RealField::from_function(
      g, [](const Point& x) { return 4.0 / (1.0 + x[0] * x[0]); });
  const RealField dQ = RealField::from_function(g, [](const Point& x) {
    const double d = 1.0 + x[0] * x[0];
    return -8.0 * x[0] / (d * d);
  });
  // L d1 Q = 0 and L(Lambda Q) = -Q.
  CHECK(l2_norm(apply_L(dQ, Q)) / l2_norm(dQ) < 1e-3);
  const RealField lq = scaling_generator(Q);
  CHECK(l2_norm(apply_L(lq, Q) + Q) / l2_norm(Q) < 1e-2);
  // Self-adjointness.
  const RealField f = random_smooth_field(g, 3);
  const RealField h = random_smooth_field(g, 4);
  CHECK(inner(apply_L(f, Q), h) ==
        doctest::Approx(inner(f, apply_L(h, Q))).epsilon(1e-10));
}

TEST_CASE("dealiased linearized operator is self-adjoint") {
  const GridSpec g = GridSpec::square(64, 16.0);
  const RealField Q = RealField::from_function(g, [](const Point& x) {
    return 3.0 * std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  const RealField f = random_smooth_field(g, 11);
  const RealField h = random_smooth_field(g, 12);
  CHECK(inner(apply_L(f, Q, true), h) ==
        doctest::Approx(inner(f, apply_L(h, Q, true))).epsilon(1e-11));
}

TEST_CASE("instability data is orthogonal and has the advertised bound") {
  const GridSpec g = GridSpec::square(64, 16.0);
  const RealField Q = RealField::from_function(g, [](const Point& x) {
    return 3.0 * std::exp(-(x[0] * x[0] + x[1] * x[1]));
  });
  const RealField psi = RealField::from_function(g, [](const Point& x) {
    return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]));
  });
  const InstabilityData d = build_instability_data(Q, psi, 10);
  CHECK(d.orthogonality_residual < 1e-10);
  CHECK(std::abs(inner(d.epsilon0, psi)) < 1e-12);
  const double qp = inner(Q, psi);
  CHECK(lower_bound_constant(Q, psi, 10) ==
        doctest::Approx((l2_norm_squared(Q) - qp * qp / l2_norm_squared(psi)) / 80.0));
  CHECK_THROWS_AS(build_instability_data(Q, psi, 0), ValidationError);
}
