#pragma once

#include <array>

#include "fdisp/field.hpp"

namespace fdisp {

/// Parameters of the tail weights
///   varphi(x) = integral_{-inf}^{s} <t>^{-2 gamma} dt,  phi(x) = <s>^{-gamma},
/// with s = sigma.x / m_scale + omega and <t> = sqrt(1 + t^2).
struct WeightParams {
  std::array<double, 2> sigma{1.0, 0.0};
  double omega = 0.0;
  double gamma = 1.0;
  double m_scale = 1.0;

  /// Throws ValidationError unless gamma lies in (1/2, (alpha+1)/2], sigma is
  /// nonzero and m_scale is positive.
  void validate(double alpha) const;

  double argument(const Point& x) const noexcept {
    return (sigma[0] * x[0] + sigma[1] * x[1]) / m_scale + omega;
  }
};

/// Antiderivative P(s) = integral_{-inf}^{s} (1 + t^2)^{-gamma} dt.
double japanese_antiderivative(double s, double gamma);

/// P(+inf) = B(gamma - 1/2, 1/2).
double japanese_total(double gamma);

double varphi(const Point& x, const WeightParams& w);
double phi_weight(const Point& x, const WeightParams& w);
RealField varphi_field(const GridSpec& grid, const WeightParams& w);
RealField phi_weight_field(const GridSpec& grid, const WeightParams& w);

/// Smooth step: 0 for t <= 0, 1 for t >= 1, C-infinity in between.
double smooth_step(double t);

/// chi(r / A) for the radial cutoff equal to 1 on r <= A and 0 on r >= 2A.
double cutoff_profile(double r, double A);
double cutoff_chi(const Point& x, double A);

/// Lambda f = f + x . grad f, x measured from the box centre.
RealField scaling_generator(const RealField& f);

/// F(x1, x2) = integral from the left box edge to x1 of Lambda Q(z, x2) dz,
/// evaluated from the trigonometric interpolant of each row. Throws when |Q|
/// on the box edge exceeds `edge_tolerance`.
RealField F_field(const RealField& Q, double edge_tolerance = 1e-3);

struct FDecayReport {
  double left_edge_max = 0.0;   ///< max |F| on the left edge column
  double sup_abs = 0.0;         ///< max |F|
  double decay_exponent = 0.0;  ///< of sup_{x1} |F(., x2)| in |x2|
  double kappa = 0.0;           ///< (1/2) integral (integral Lambda Q dx1)^2 dx2
};

FDecayReport F_decay_check(const RealField& Q, const RealField& F);

/// (1/2) integral over x2 of (integral over x1 of Lambda Q)^2.
double kappa_constant(const RealField& Q);

}  // namespace fdisp
