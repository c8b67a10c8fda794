#pragma once

#include <span>

namespace fdisp {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Slope of log y against log x; all inputs must be positive.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct PowerLawFit {
  double exponent = 0.0;
  double amplitude = 0.0;
  double rms_log_residual = 0.0;
  int samples = 0;
};

/// Fits y(r) = C * sum over lattice images of |r e - n L|^{-p} in log space,
/// where e is a unit vector along one lattice axis. This accounts for the
/// periodic copies that flatten the tail of a decaying profile sampled on a
/// periodic box of side `period`. `dim` sets the image lattice dimension.
PowerLawFit fit_periodized_power_law(std::span<const double> r,
                                     std::span<const double> y, double period,
                                     int dim, int images = 3);

}  // namespace fdisp
