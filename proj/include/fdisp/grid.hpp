#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace fdisp {

/// Coordinate axis. `x1` is the propagation direction.
enum class Axis : int { x1 = 0, x2 = 1 };

inline constexpr int index(Axis a) { return static_cast<int>(a); }

/// A point of the computational box; the second entry is unused in 1D.
using Point = std::array<double, 2>;

/// Periodic box [-L/2, L/2)^dim sampled on a uniform tensor grid.
///
/// Values are stored row-major with x1 as the fastest index, so in 2D the
/// flat index of (i, j) is j * nx + i. The box is centred on the origin and
/// grid point i sits at -L/2 + i * h.
class GridSpec {
 public:
  GridSpec(int dim, std::array<int, 2> points, std::array<double, 2> lengths);

  static GridSpec line(int n, double length);
  static GridSpec square(int n, double length);

  int dim() const noexcept { return dim_; }
  int points(Axis a) const noexcept { return points_[index(a)]; }
  int points(int a) const noexcept { return points_[a]; }
  double length(Axis a) const noexcept { return lengths_[index(a)]; }
  double length(int a) const noexcept { return lengths_[a]; }
  double spacing(int a) const noexcept { return lengths_[a] / points_[a]; }
  double spacing(Axis a) const noexcept { return spacing(index(a)); }

  int nx() const noexcept { return points_[0]; }
  int ny() const noexcept { return dim_ == 2 ? points_[1] : 1; }

  /// Number of real samples.
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nx()) * static_cast<std::size_t>(ny());
  }

  /// Number of stored complex coefficients of the half spectrum
  /// (x1 wavenumbers 0..nx/2, all x2 wavenumbers).
  std::size_t spectral_size() const noexcept {
    return static_cast<std::size_t>(nx() / 2 + 1) *
           static_cast<std::size_t>(ny());
  }

  double cell_volume() const noexcept;
  double box_volume() const noexcept;

  double coordinate(int axis, int i) const noexcept {
    return -0.5 * lengths_[axis] + i * spacing(axis);
  }

  /// Signed DFT mode number of storage slot i along an axis.
  int mode(int axis, int i) const noexcept {
    const int n = points_[axis];
    return i <= n / 2 ? i : i - n;
  }

  double wavenumber(int axis, int i) const noexcept;

  /// Largest resolved wavenumber (the Nyquist wavenumber) along an axis.
  double max_wavenumber(int axis) const noexcept;

  Point point(std::size_t flat) const noexcept;

  std::string describe() const;

  friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
    return a.dim_ == b.dim_ && a.nx() == b.nx() && a.ny() == b.ny() &&
           a.lengths_[0] == b.lengths_[0] &&
           (a.dim_ == 1 || a.lengths_[1] == b.lengths_[1]);
  }

 private:
  int dim_;
  std::array<int, 2> points_;
  std::array<double, 2> lengths_;
};

}  // namespace fdisp
