#include "fdisp/field.hpp"

#include <algorithm>
#include <cmath>

#include "fdisp/error.hpp"

namespace fdisp {

RealField::RealField(const GridSpec& grid)
    : grid_(grid), values_(grid.size(), 0.0) {}

RealField::RealField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  require(values_.size() == grid_.size(),
          "field value count does not match the grid");
}

RealField RealField::constant(const GridSpec& grid, double value) {
  return RealField(grid, std::vector<double>(grid.size(), value));
}

RealField RealField::from_function(
    const GridSpec& grid, const std::function<double(const Point&)>& f) {
  RealField out(grid);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(grid.point(k));
  return out;
}

bool RealField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void require_same_grid(const RealField& a, const RealField& b) {
  if (!(a.grid() == b.grid()))
    throw ValidationError("fields live on different grids (" +
                          a.grid().describe() + " vs " + b.grid().describe() +
                          ")");
}

RealField& RealField::operator+=(const RealField& o) {
  require_same_grid(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

RealField& RealField::operator-=(const RealField& o) {
  require_same_grid(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

RealField& RealField::operator*=(const RealField& o) {
  require_same_grid(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] *= o.values_[k];
  return *this;
}

RealField& RealField::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

RealField& RealField::axpy(double s, const RealField& o) {
  require_same_grid(*this, o);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * o.values_[k];
  return *this;
}

SpectralField::SpectralField(const GridSpec& grid)
    : grid_(grid), coeffs_(grid.spectral_size()) {}

}  // namespace fdisp
