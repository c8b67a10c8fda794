#include "fdisp/resample.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

#include "fdisp/error.hpp"
#include "fdisp/fourier.hpp"

namespace fdisp {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Cardinal function of the real trigonometric interpolant on n points, at a
// distance of t grid spacings from the node.
double periodic_cardinal(double t, int n) {
  const double r = std::round(t);
  if (std::abs(t - r) < 1e-13) {
    const long m = static_cast<long>(r) % n;
    return m == 0 ? 1.0 : 0.0;
  }
  const double pi = std::numbers::pi;
  const double sign = (static_cast<long>(r) % 2 == 0) ? 1.0 : -1.0;
  const double s = sign * std::sin(pi * (t - r));
  return s * std::cos(pi * t / n) / (n * std::sin(pi * t / n));
}

RowMatrix axis_weights(const GridSpec& g, int axis, std::span<const double> y,
                       Outside outside) {
  const int n = g.points(axis);
  const double h = g.spacing(axis);
  const double half = 0.5 * g.length(axis);
  RowMatrix w = RowMatrix::Zero(static_cast<Eigen::Index>(y.size()), n);
  for (std::size_t r = 0; r < y.size(); ++r) {
    if (outside == Outside::zero && (y[r] < -half || y[r] >= half)) continue;
    const double t = (y[r] + half) / h;
    for (int i = 0; i < n; ++i)
      w(static_cast<Eigen::Index>(r), i) = periodic_cardinal(t - i, n);
  }
  return w;
}

std::vector<double> grid_coordinates(const GridSpec& g, int axis,
                                     double scale, double shift) {
  std::vector<double> y(static_cast<std::size_t>(g.points(axis)));
  for (int i = 0; i < g.points(axis); ++i)
    y[static_cast<std::size_t>(i)] = scale * g.coordinate(axis, i) + shift;
  return y;
}

}  // namespace

std::vector<double> interpolate_tensor(const RealField& f,
                                       std::span<const double> x1,
                                       std::span<const double> x2,
                                       Outside outside) {
  const GridSpec& g = f.grid();
  const RowMatrix w1 = axis_weights(g, 0, x1, outside);
  const auto m1 = static_cast<Eigen::Index>(x1.size());
  std::vector<double> out;
  if (g.dim() == 1) {
    Eigen::Map<const Eigen::VectorXd> v(f.data(), g.nx());
    out.resize(x1.size());
    Eigen::Map<Eigen::VectorXd>(out.data(), m1) = w1 * v;
    return out;
  }
  const auto m2 = static_cast<Eigen::Index>(x2.size());
  const RowMatrix w2 = axis_weights(g, 1, x2, outside);
  Eigen::Map<const RowMatrix> v(f.data(), g.ny(), g.nx());
  out.resize(x1.size() * x2.size());
  Eigen::Map<RowMatrix> res(out.data(), m2, m1);
  const RowMatrix rows = w2 * v;
  res.noalias() = rows * w1.transpose();
  return out;
}

RealField affine_resample(const RealField& f, double scale, const Point& shift,
                          Outside outside) {
  require(std::isfinite(scale) && scale > 0.0,
          "affine_resample: scale must be positive");
  const GridSpec& g = f.grid();
  const auto y1 = grid_coordinates(g, 0, scale, shift[0]);
  const auto y2 = g.dim() == 2 ? grid_coordinates(g, 1, scale, shift[1])
                               : std::vector<double>{};
  return RealField(g, interpolate_tensor(f, y1, y2, outside));
}

RealField resample_to(const RealField& f, const GridSpec& target,
                      Outside outside) {
  require(f.grid().dim() == target.dim(),
          "resample_to: dimension mismatch between grids");
  const auto y1 = grid_coordinates(target, 0, 1.0, 0.0);
  const auto y2 = target.dim() == 2 ? grid_coordinates(target, 1, 1.0, 0.0)
                                    : std::vector<double>{};
  return RealField(target, interpolate_tensor(f, y1, y2, outside));
}

RealField translate(const RealField& f, const Point& d) {
  return apply_multiplier(
      f,
      [&d](double k1, double k2) {
        return std::polar(1.0, -(k1 * d[0] + k2 * d[1]));
      },
      Parity::even);
}

}  // namespace fdisp
