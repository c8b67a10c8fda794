#pragma once

#include <complex>
#include <functional>

#include "fdisp/field.hpp"

namespace fdisp {

// Discrete Fourier machinery on the periodic box.
//
// Normalization: the forward transform is the unscaled sum
//   F_k = sum_j f_j exp(-i k.x_j),
// and the inverse divides by the point count. Plancherel therefore reads
//   h^d sum_j |f_j|^2 = (h^d / N) sum_k |F_k|^2,
// and every norm below folds that constant in. All multiplier operators send
// the zero mode of |k|^s with s < 0 to zero.

SpectralField forward_transform(const RealField& f);
RealField inverse_transform(const SpectralField& s);

/// Symbol of a Fourier multiplier as a function of (k1, k2).
using Symbol = std::function<std::complex<double>(double k1, double k2)>;

/// Whether the symbol is odd in one coordinate. Odd symbols are zeroed on the
/// corresponding Nyquist line so that real fields stay real.
enum class Parity { even, odd_x1, odd_x2 };

void multiply_spectrum(SpectralField& s, const Symbol& symbol, Parity parity);
RealField apply_multiplier(const RealField& f, const Symbol& symbol,
                           Parity parity);

/// |nabla|^alpha with alpha restricted to [1, 2].
RealField fractional_laplacian(const RealField& f, double alpha);

/// |nabla|^s for any real s; for s < 0 the zero mode is sent to zero.
RealField fractional_power(const RealField& f, double s);

/// Riesz transform with symbol -i k_axis / |k| (zero at k = 0).
RealField riesz_transform(const RealField& f, Axis axis);

/// d/dx1 |nabla|^alpha, symbol i k1 |k|^alpha.
RealField dispersion_apply(const RealField& f, double alpha);

RealField partial_derivative(const RealField& f, Axis axis);

/// 2/3-rule truncation: keeps modes with |m| < N/3 on every axis.
RealField dealias(const RealField& f);
void dealias_spectrum(SpectralField& s);
bool dealias_keeps(const GridSpec& grid, int i, int j);

/// Quadratures on the box (rectangle rule, spectrally accurate for periodic
/// integrands).
double integral(const RealField& f);
double inner(const RealField& f, const RealField& g);
double l2_norm_squared(const RealField& f);
double l2_norm(const RealField& f);
double max_abs(const RealField& f);
double mean(const RealField& f);

/// (h^d / N) sum_k w_k |F_k|^2, i.e. the physical L2 norm squared.
double spectral_norm_squared(const SpectralField& s);

/// sum_k w(k) |f^(k)|^2 with the Plancherel constant folded in.
double weighted_spectral_sum(const SpectralField& s,
                             const std::function<double(double, double)>& w);

/// ||f||^2_{H^{1/2}} = integral of <k> |f^|^2 (Plancherel-normalized).
double sobolev_half_norm_squared(const RealField& f);
double sobolev_half_norm(const RealField& f);
/// H^{1/2} inner product.
double sobolev_half_inner(const RealField& f, const RealField& g);

/// integral of ||nabla|^{alpha/2} f|^2.
double homogeneous_half_energy(const RealField& f, double alpha);

}  // namespace fdisp
