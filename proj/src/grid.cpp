#include "fdisp/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fdisp/error.hpp"

namespace fdisp {

GridSpec::GridSpec(int dim, std::array<int, 2> points,
                   std::array<double, 2> lengths)
    : dim_(dim), points_(points), lengths_(lengths) {
  require(dim == 1 || dim == 2, "grid dimension must be 1 or 2");
  if (dim == 1) {
    points_[1] = 1;
    lengths_[1] = 1.0;
  }
  for (int a = 0; a < dim; ++a) {
    require(points_[a] >= 16 && points_[a] % 2 == 0,
            "points per axis must be even and at least 16");
    require(std::isfinite(lengths_[a]) && lengths_[a] > 0.0,
            "box length must be positive");
  }
}

GridSpec GridSpec::line(int n, double length) {
  return GridSpec(1, {n, 1}, {length, 1.0});
}

GridSpec GridSpec::square(int n, double length) {
  return GridSpec(2, {n, n}, {length, length});
}

double GridSpec::cell_volume() const noexcept {
  double v = spacing(0);
  if (dim_ == 2) v *= spacing(1);
  return v;
}

double GridSpec::box_volume() const noexcept {
  return dim_ == 2 ? lengths_[0] * lengths_[1] : lengths_[0];
}

double GridSpec::wavenumber(int axis, int i) const noexcept {
  return 2.0 * std::numbers::pi * mode(axis, i) / lengths_[axis];
}

double GridSpec::max_wavenumber(int axis) const noexcept {
  return std::numbers::pi / spacing(axis);
}

Point GridSpec::point(std::size_t flat) const noexcept {
  const int n = nx();
  const int i = static_cast<int>(flat % static_cast<std::size_t>(n));
  const int j = static_cast<int>(flat / static_cast<std::size_t>(n));
  return {coordinate(0, i), dim_ == 2 ? coordinate(1, j) : 0.0};
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  if (dim_ == 1) {
    os << nx() << " points, L=" << lengths_[0];
  } else {
    os << nx() << "x" << ny() << " points, L=" << lengths_[0] << "x"
       << lengths_[1];
  }
  return os.str();
}

}  // namespace fdisp
