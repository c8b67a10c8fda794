#include "fdisp/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "fdisp/error.hpp"

namespace fdisp {
namespace {

// FFTW plans for one grid shape. Planning is not thread-safe, execution is;
// plans are created once under a mutex and shared afterwards. FFTW_ESTIMATE
// keeps the chosen algorithm (and hence every rounding) reproducible.
class Plans {
 public:
  explicit Plans(const GridSpec& g) {
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::vector<double> r(g.size());
    std::vector<std::complex<double>> c(g.spectral_size());
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    if (g.dim() == 1) {
      forward_ = fftw_plan_dft_r2c_1d(g.nx(), r.data(), cp, flags);
      inverse_ = fftw_plan_dft_c2r_1d(g.nx(), cp, r.data(), flags);
    } else {
      forward_ = fftw_plan_dft_r2c_2d(g.ny(), g.nx(), r.data(), cp, flags);
      inverse_ = fftw_plan_dft_c2r_2d(g.ny(), g.nx(), cp, r.data(), flags);
    }
    if (forward_ == nullptr || inverse_ == nullptr)
      throw NumericalError("FFTW planning failed for " + g.describe());
  }
  ~Plans() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;

  void forward(const double* in, std::complex<double>* out) const {
    fftw_execute_dft_r2c(forward_, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
  }
  // Destroys `in`.
  void inverse(std::complex<double>* in, double* out) const {
    fftw_execute_dft_c2r(inverse_, reinterpret_cast<fftw_complex*>(in), out);
  }

 private:
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

const Plans& plans_for(const GridSpec& g) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<Plans>> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(g.dim(), g.nx(), g.ny());
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<Plans>(g)).first;
  return *it->second;
}

// Multiplicity of a half-spectrum column: interior x1 wavenumbers stand for
// the conjugate pair.
inline double column_weight(int i, int nx) {
  return (i == 0 || i == nx / 2) ? 1.0 : 2.0;
}

template <typename Fn>
void for_each_mode(const GridSpec& g, Fn&& fn) {
  const int half = g.nx() / 2 + 1;
  const int ny = g.ny();
  std::size_t k = 0;
  for (int j = 0; j < ny; ++j) {
    const double k2 = g.dim() == 2 ? g.wavenumber(1, j) : 0.0;
    for (int i = 0; i < half; ++i, ++k) fn(k, i, j, g.wavenumber(0, i), k2);
  }
}

void require_alpha(double alpha) {
  if (!(alpha >= 1.0 && alpha <= 2.0))
    throw ValidationError("dispersion exponent alpha must lie in [1, 2]");
}

}  // namespace

SpectralField forward_transform(const RealField& f) {
  if (!f.all_finite())
    throw ValidationError("forward_transform: field has non-finite values");
  SpectralField s(f.grid());
  plans_for(f.grid()).forward(f.data(), s.coeffs().data());
  return s;
}

RealField inverse_transform(const SpectralField& s) {
  std::vector<std::complex<double>> scratch(s.coeffs().begin(),
                                            s.coeffs().end());
  RealField out(s.grid());
  plans_for(s.grid()).inverse(scratch.data(), out.data());
  out *= 1.0 / static_cast<double>(s.grid().size());
  return out;
}

void multiply_spectrum(SpectralField& s, const Symbol& symbol, Parity parity) {
  const GridSpec& g = s.grid();
  const int nyq1 = g.nx() / 2;
  const int nyq2 = g.dim() == 2 ? g.ny() / 2 : -1;
  for_each_mode(g, [&](std::size_t k, int i, int j, double k1, double k2) {
    if ((parity == Parity::odd_x1 && i == nyq1) ||
        (parity == Parity::odd_x2 && j == nyq2)) {
      s[k] = 0.0;
      return;
    }
    s[k] *= symbol(k1, k2);
  });
}

RealField apply_multiplier(const RealField& f, const Symbol& symbol,
                           Parity parity) {
  SpectralField s = forward_transform(f);
  multiply_spectrum(s, symbol, parity);
  return inverse_transform(s);
}

RealField fractional_laplacian(const RealField& f, double alpha) {
  require_alpha(alpha);
  return fractional_power(f, alpha);
}

RealField fractional_power(const RealField& f, double s) {
  return apply_multiplier(
      f,
      [s](double k1, double k2) -> std::complex<double> {
        const double k = std::hypot(k1, k2);
        if (k == 0.0) return s == 0.0 ? 1.0 : 0.0;
        return std::pow(k, s);
      },
      Parity::even);
}

RealField riesz_transform(const RealField& f, Axis axis) {
  require(index(axis) < f.grid().dim(), "riesz_transform: axis out of range");
  const bool first = axis == Axis::x1;
  return apply_multiplier(
      f,
      [first](double k1, double k2) -> std::complex<double> {
        const double k = std::hypot(k1, k2);
        if (k == 0.0) return 0.0;
        return {0.0, -(first ? k1 : k2) / k};
      },
      first ? Parity::odd_x1 : Parity::odd_x2);
}

RealField dispersion_apply(const RealField& f, double alpha) {
  require_alpha(alpha);
  return apply_multiplier(
      f,
      [alpha](double k1, double k2) -> std::complex<double> {
        const double k = std::hypot(k1, k2);
        return {0.0, k1 * std::pow(k, alpha)};
      },
      Parity::odd_x1);
}

RealField partial_derivative(const RealField& f, Axis axis) {
  require(index(axis) < f.grid().dim(),
          "partial_derivative: axis out of range");
  const bool first = axis == Axis::x1;
  return apply_multiplier(
      f,
      [first](double k1, double k2) -> std::complex<double> {
        return {0.0, first ? k1 : k2};
      },
      first ? Parity::odd_x1 : Parity::odd_x2);
}

bool dealias_keeps(const GridSpec& g, int i, int j) {
  if (3 * std::abs(g.mode(0, i)) >= g.nx()) return false;
  if (g.dim() == 2 && 3 * std::abs(g.mode(1, j)) >= g.ny()) return false;
  return true;
}

void dealias_spectrum(SpectralField& s) {
  const GridSpec& g = s.grid();
  for_each_mode(g, [&](std::size_t k, int i, int j, double, double) {
    if (!dealias_keeps(g, i, j)) s[k] = 0.0;
  });
}

RealField dealias(const RealField& f) {
  SpectralField s = forward_transform(f);
  dealias_spectrum(s);
  return inverse_transform(s);
}

double integral(const RealField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

double inner(const RealField& f, const RealField& g) {
  require_same_grid(f, g);
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) sum += f[k] * g[k];
  return sum * f.grid().cell_volume();
}

double l2_norm_squared(const RealField& f) { return inner(f, f); }

double l2_norm(const RealField& f) { return std::sqrt(l2_norm_squared(f)); }

double max_abs(const RealField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double mean(const RealField& f) {
  return integral(f) / f.grid().box_volume();
}

double weighted_spectral_sum(const SpectralField& s,
                             const std::function<double(double, double)>& w) {
  const GridSpec& g = s.grid();
  double sum = 0.0;
  for_each_mode(g, [&](std::size_t k, int i, int, double k1, double k2) {
    sum += column_weight(i, g.nx()) * w(k1, k2) * std::norm(s[k]);
  });
  return sum * g.cell_volume() / static_cast<double>(g.size());
}

double spectral_norm_squared(const SpectralField& s) {
  return weighted_spectral_sum(s, [](double, double) { return 1.0; });
}

double sobolev_half_norm_squared(const RealField& f) {
  return weighted_spectral_sum(forward_transform(f), [](double k1, double k2) {
    return std::sqrt(1.0 + k1 * k1 + k2 * k2);
  });
}

double sobolev_half_norm(const RealField& f) {
  return std::sqrt(sobolev_half_norm_squared(f));
}

double sobolev_half_inner(const RealField& f, const RealField& g) {
  require_same_grid(f, g);
  const SpectralField a = forward_transform(f);
  const SpectralField b = forward_transform(g);
  const GridSpec& grid = f.grid();
  double sum = 0.0;
  for_each_mode(grid, [&](std::size_t k, int i, int, double k1, double k2) {
    sum += column_weight(i, grid.nx()) * std::sqrt(1.0 + k1 * k1 + k2 * k2) *
           (a[k].real() * b[k].real() + a[k].imag() * b[k].imag());
  });
  return sum * grid.cell_volume() / static_cast<double>(grid.size());
}

double homogeneous_half_energy(const RealField& f, double alpha) {
  return weighted_spectral_sum(forward_transform(f),
                               [alpha](double k1, double k2) {
                                 const double k = std::hypot(k1, k2);
                                 return k == 0.0 ? 0.0 : std::pow(k, alpha);
                               });
}

}  // namespace fdisp
