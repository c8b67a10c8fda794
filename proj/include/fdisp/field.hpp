#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "fdisp/grid.hpp"

namespace fdisp {

/// Real samples of a function on a GridSpec.
class RealField {
 public:
  explicit RealField(const GridSpec& grid);
  RealField(const GridSpec& grid, std::vector<double> values);

  static RealField constant(const GridSpec& grid, double value);
  static RealField from_function(const GridSpec& grid,
                                 const std::function<double(const Point&)>& f);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  /// 2D access (i along x1, j along x2); j is ignored in 1D.
  double& at(int i, int j = 0) noexcept { return values_[flat(i, j)]; }
  double at(int i, int j = 0) const noexcept { return values_[flat(i, j)]; }

  bool all_finite() const noexcept;

  RealField& operator+=(const RealField& o);
  RealField& operator-=(const RealField& o);
  RealField& operator*=(const RealField& o);
  RealField& operator*=(double s) noexcept;

  friend RealField operator+(RealField a, const RealField& b) { return a += b; }
  friend RealField operator-(RealField a, const RealField& b) { return a -= b; }
  friend RealField operator*(RealField a, const RealField& b) { return a *= b; }
  friend RealField operator*(RealField a, double s) { return a *= s; }
  friend RealField operator*(double s, RealField a) { return a *= s; }

  /// this += s * o
  RealField& axpy(double s, const RealField& o);

 private:
  std::size_t flat(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_.nx()) +
           static_cast<std::size_t>(i);
  }

  GridSpec grid_;
  std::vector<double> values_;
};

/// Half-spectrum DFT coefficients of a RealField: x1 wavenumbers 0..nx/2
/// times every x2 wavenumber, stored with the x1 index fastest. The negative
/// x1 half is implied by Hermitian symmetry.
class SpectralField {
 public:
  explicit SpectralField(const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  std::span<std::complex<double>> coeffs() noexcept { return coeffs_; }
  std::span<const std::complex<double>> coeffs() const noexcept {
    return coeffs_;
  }
  std::complex<double>& operator[](std::size_t k) noexcept { return coeffs_[k]; }
  const std::complex<double>& operator[](std::size_t k) const noexcept {
    return coeffs_[k];
  }

  /// Coefficient of storage slot (i over x1 in 0..nx/2, j over x2).
  std::complex<double>& at(int i, int j = 0) noexcept {
    return coeffs_[static_cast<std::size_t>(j) * half() + i];
  }
  const std::complex<double>& at(int i, int j = 0) const noexcept {
    return coeffs_[static_cast<std::size_t>(j) * half() + i];
  }

  std::size_t half() const noexcept {
    return static_cast<std::size_t>(grid_.nx() / 2 + 1);
  }

 private:
  GridSpec grid_;
  std::vector<std::complex<double>> coeffs_;
};

void require_same_grid(const RealField& a, const RealField& b);

}  // namespace fdisp
