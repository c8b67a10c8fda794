#include "fdisp/fit.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <vector>

#include "fdisp/error.hpp"

namespace fdisp {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2,
          "fit_line: need at least two matching samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "fit_line: abscissae are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "loglog_slope: non-positive sample");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly).slope;
}

PowerLawFit fit_periodized_power_law(std::span<const double> r,
                                     std::span<const double> y, double period,
                                     int dim, int images) {
  require(r.size() == y.size() && r.size() >= 3,
          "power-law fit: need at least three matching samples");
  require(dim == 1 || dim == 2, "power-law fit: dimension must be 1 or 2");
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    require(y[i] > 0.0 && r[i] > 0.0, "power-law fit: non-positive sample");
    ly[i] = std::log(y[i]);
  }
  const int m_images = dim == 2 ? images : 0;

  // log of the image sum; the amplitude is eliminated in closed form.
  auto log_images = [&](double ri, double p) {
    double s = 0.0;
    for (int n = -images; n <= images; ++n)
      for (int m = -m_images; m <= m_images; ++m) {
        const double a = ri - n * period;
        const double b = m * period;
        s += std::pow(a * a + b * b, -0.5 * p);
      }
    return std::log(s);
  };
  auto residual = [&](double p, double* log_c) {
    std::vector<double> d(r.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      d[i] = ly[i] - log_images(r[i], p);
      mean += d[i];
    }
    mean /= static_cast<double>(r.size());
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    if (log_c != nullptr) *log_c = mean;
    return ss;
  };

  const auto best = boost::math::tools::brent_find_minima(
      [&](double p) { return residual(p, nullptr); }, 0.1, 60.0, 40);
  PowerLawFit out;
  out.exponent = best.first;
  double log_c = 0.0;
  const double ss = residual(best.first, &log_c);
  out.amplitude = std::exp(log_c);
  out.rms_log_residual = std::sqrt(ss / static_cast<double>(r.size()));
  out.samples = static_cast<int>(r.size());
  return out;
}

}  // namespace fdisp
