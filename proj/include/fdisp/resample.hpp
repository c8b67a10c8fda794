#pragma once

#include <span>
#include <vector>

#include "fdisp/field.hpp"

namespace fdisp {

/// What the trigonometric interpolant returns at targets outside the box.
enum class Outside { periodic, zero };

/// Evaluates the trigonometric interpolant of `f` on the tensor product of
/// target coordinates `x1` and `x2` (ignored in 1D). Result is row-major with
/// x1 fastest, i.e. x2.size() rows of x1.size() values.
std::vector<double> interpolate_tensor(const RealField& f,
                                       std::span<const double> x1,
                                       std::span<const double> x2,
                                       Outside outside = Outside::periodic);

/// g(x) = f(scale * x + shift) sampled on f's own grid.
RealField affine_resample(const RealField& f, double scale, const Point& shift,
                          Outside outside = Outside::periodic);

/// Interpolant of `f` sampled on another grid of the same dimension.
RealField resample_to(const RealField& f, const GridSpec& target,
                      Outside outside = Outside::zero);

/// f(x - d) for any real shift, via spectral phase multiplication.
RealField translate(const RealField& f, const Point& d);

}  // namespace fdisp
