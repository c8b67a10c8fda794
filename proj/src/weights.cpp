#include "fdisp/weights.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "fdisp/error.hpp"
#include "fdisp/fit.hpp"
#include "fdisp/fourier.hpp"

namespace fdisp {

void WeightParams::validate(double alpha) const {
  if (!(gamma > 0.5 && gamma <= 0.5 * (alpha + 1.0) + 1e-12))
    throw ValidationError(
        "gamma must lie in (1/2, (alpha+1)/2] for the monotonicity weights");
  require(sigma[0] != 0.0 || sigma[1] != 0.0, "sigma must be nonzero");
  require(std::isfinite(m_scale) && m_scale > 0.0, "m_scale must be positive");
  require(std::isfinite(omega), "omega must be finite");
}

double japanese_total(double gamma) {
  require(gamma > 0.5, "weight exponent gamma must exceed 1/2");
  return boost::math::beta(gamma - 0.5, 0.5);
}

double japanese_antiderivative(double s, double gamma) {
  require(gamma > 0.5, "weight exponent gamma must exceed 1/2");
  if (gamma == 1.0) return std::atan(s) + 0.5 * std::numbers::pi;
  if (gamma == 1.5) return s / std::sqrt(1.0 + s * s) + 1.0;
  // With u = 1/(1+t^2) the left tail becomes an incomplete beta integral.
  const double y = std::abs(s);
  const double tail =
      0.5 * boost::math::beta(gamma - 0.5, 0.5, 1.0 / (1.0 + y * y));
  return s <= 0.0 ? tail : japanese_total(gamma) - tail;
}

double varphi(const Point& x, const WeightParams& w) {
  return japanese_antiderivative(w.argument(x), w.gamma);
}

double phi_weight(const Point& x, const WeightParams& w) {
  const double s = w.argument(x);
  return std::pow(1.0 + s * s, -0.5 * w.gamma);
}

RealField varphi_field(const GridSpec& grid, const WeightParams& w) {
  return RealField::from_function(grid,
                                  [&w](const Point& x) { return varphi(x, w); });
}

RealField phi_weight_field(const GridSpec& grid, const WeightParams& w) {
  return RealField::from_function(
      grid, [&w](const Point& x) { return phi_weight(x, w); });
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double cutoff_profile(double r, double A) {
  require(A >= 1.0, "cutoff scale A must be at least 1");
  return 1.0 - smooth_step(std::abs(r) / A - 1.0);
}

double cutoff_chi(const Point& x, double A) {
  return cutoff_profile(std::hypot(x[0], x[1]), A);
}

RealField scaling_generator(const RealField& f) {
  const GridSpec& g = f.grid();
  RealField out = f;
  const RealField d1 = partial_derivative(f, Axis::x1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += g.point(k)[0] * d1[k];
  if (g.dim() == 2) {
    const RealField d2 = partial_derivative(f, Axis::x2);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] += g.point(k)[1] * d2[k];
  }
  return out;
}

namespace {

// Row-wise integral from the left edge of the trigonometric interpolant:
// the mean contributes linearly, the rest through its periodic antiderivative.
RealField cumulative_x1(const RealField& f) {
  const GridSpec& g = f.grid();
  const GridSpec row_grid = GridSpec::line(g.nx(), g.length(0));
  const double x_left = g.coordinate(0, 0);
  RealField out(g);
  RealField row(row_grid);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) row[i] = f.at(i, j);
    SpectralField s = forward_transform(row);
    const double mean = s[0].real() / g.nx();
    s[0] = 0.0;
    s[static_cast<std::size_t>(g.nx() / 2)] = 0.0;
    for (int i = 1; i < g.nx() / 2; ++i)
      s[static_cast<std::size_t>(i)] /=
          std::complex<double>(0.0, row_grid.wavenumber(0, i));
    const RealField G = inverse_transform(s);
    for (int i = 0; i < g.nx(); ++i)
      out.at(i, j) = mean * (g.coordinate(0, i) - x_left) + G[i] - G[0];
  }
  return out;
}

double edge_max(const RealField& f) {
  const GridSpec& g = f.grid();
  double m = 0.0;
  for (int j = 0; j < g.ny(); ++j) m = std::max(m, std::abs(f.at(0, j)));
  if (g.dim() == 2)
    for (int i = 0; i < g.nx(); ++i) m = std::max(m, std::abs(f.at(i, 0)));
  return m;
}

}  // namespace

RealField F_field(const RealField& Q, double edge_tolerance) {
  require(Q.grid().dim() == 2, "F_field needs a two-dimensional profile");
  if (edge_max(Q) > edge_tolerance)
    throw ValidationError("profile is not small at the box edge; enlarge the box");
  return cumulative_x1(scaling_generator(Q));
}

double kappa_constant(const RealField& Q) {
  const GridSpec& g = Q.grid();
  require(g.dim() == 2, "kappa needs a two-dimensional profile");
  const RealField LQ = scaling_generator(Q);
  double sum = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx(); ++i) row += LQ.at(i, j);
    row *= g.spacing(0);
    sum += row * row;
  }
  return 0.5 * sum * g.spacing(1);
}

FDecayReport F_decay_check(const RealField& Q, const RealField& F) {
  const GridSpec& g = F.grid();
  FDecayReport rep;
  for (int j = 0; j < g.ny(); ++j)
    rep.left_edge_max = std::max(rep.left_edge_max, std::abs(F.at(0, j)));
  rep.sup_abs = max_abs(F);
  rep.kappa = kappa_constant(Q);

  const double L = g.length(1);
  std::vector<double> r, y;
  for (int j = g.ny() / 2; j < g.ny(); ++j) {
    const double x2 = g.coordinate(1, j);
    if (x2 < 0.2 * L || x2 > 0.4 * L) continue;
    double sup = 0.0;
    for (int i = 0; i < g.nx(); ++i) sup = std::max(sup, std::abs(F.at(i, j)));
    if (sup < 1e-14) continue;
    r.push_back(x2);
    y.push_back(sup);
  }
  rep.decay_exponent = r.size() >= 3 ? fit_periodized_power_law(r, y, L, 1).exponent
                                     : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

}  // namespace fdisp
