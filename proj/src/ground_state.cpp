#include "fdisp/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fdisp/error.hpp"
#include "fdisp/fit.hpp"
#include "fdisp/fourier.hpp"
#include "fdisp/resample.hpp"

namespace fdisp {
namespace {

std::vector<double> elliptic_symbol(const GridSpec& g, double alpha, double c) {
  std::vector<double> m(g.spectral_size());
  const int half = g.nx() / 2 + 1;
  for (int j = 0; j < g.ny(); ++j) {
    const double k2 = g.dim() == 2 ? g.wavenumber(1, j) : 0.0;
    for (int i = 0; i < half; ++i) {
      const double k = std::hypot(g.wavenumber(0, i), k2);
      m[static_cast<std::size_t>(j) * half + i] = c + std::pow(k, alpha);
    }
  }
  return m;
}

RealField half_square(const RealField& q) {
  RealField out = q;
  for (double& v : out.values()) v = 0.5 * v * v;
  return out;
}

void check_parameters(double alpha, double c) {
  require(alpha >= 1.0 && alpha <= 2.0, "alpha must lie in [1, 2]");
  require(std::isfinite(c) && c > 0.0, "speed c must be positive");
}

}  // namespace

RealField default_initial_guess(const GridSpec& grid) {
  return RealField::from_function(grid, [](const Point& x) {
    return 2.0 * std::exp(-(x[0] * x[0] + x[1] * x[1]) / 4.0);
  });
}

double ground_state_residual(const RealField& Q, double alpha, double c,
                             bool dealiased) {
  RealField r = fractional_power(Q, alpha);
  r.axpy(c, Q);
  r -= dealiased ? dealias(half_square(Q)) : half_square(Q);
  return l2_norm(r) / l2_norm(Q);
}

GroundStateBundle petviashvili_solve(double alpha, double c,
                                     const GridSpec& grid,
                                     std::optional<RealField> init,
                                     const GroundStateOptions& opts) {
  check_parameters(alpha, c);
  RealField q = init ? std::move(*init) : default_initial_guess(grid);
  require(q.grid() == grid, "initial guess lives on a different grid");
  require(q.all_finite(), "initial guess has non-finite values");
  if (opts.dealias) q = dealias(q);

  const std::vector<double> m = elliptic_symbol(grid, alpha, c);
  double stabilizer = 0.0;
  double residual = 0.0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const SpectralField qh = forward_transform(q);
    SpectralField nh = forward_transform(half_square(q));
    if (opts.dealias) dealias_spectrum(nh);
    // S = (Q, (c + |k|^alpha) Q) / (Q, Q^2/2), evaluated on the half spectrum.
    double num = 0.0, den = 0.0, res = 0.0, qq = 0.0;
    const int half = grid.nx() / 2 + 1;
    for (std::size_t k = 0; k < qh.size(); ++k) {
      const int i = static_cast<int>(k % static_cast<std::size_t>(half));
      const double w = (i == 0 || i == grid.nx() / 2) ? 1.0 : 2.0;
      num += w * m[k] * std::norm(qh[k]);
      den += w * (std::conj(qh[k]) * nh[k]).real();
      res += w * std::norm(m[k] * qh[k] - nh[k]);
      qq += w * std::norm(qh[k]);
    }
    if (!(den > 0.0) || qq < 1e-30)
      throw NumericalError("ground-state iteration collapsed to zero");
    stabilizer = num / den;
    residual = std::sqrt(res / qq);
    if (!std::isfinite(residual))
      throw NumericalError("ground-state iteration produced non-finite values");
    if (residual < opts.residual_tolerance &&
        std::abs(stabilizer - 1.0) < opts.stabilizer_tolerance)
      break;
    const double s2 = stabilizer * stabilizer;
    for (std::size_t k = 0; k < nh.size(); ++k) nh[k] *= s2 / m[k];
    q = inverse_transform(nh);
  }
  if (it == opts.max_iterations)
    throw NumericalError("ground-state iteration did not converge in " +
                         std::to_string(opts.max_iterations) +
                         " iterations (residual " + std::to_string(residual) +
                         ")");
  if (max_abs(q) < 1e-8)
    throw NumericalError("ground-state iteration collapsed to zero");
  const double qmin = *std::min_element(q.values().begin(), q.values().end());
  if (qmin < -1e-10)
    throw NumericalError("ground state has negative values (min " +
                         std::to_string(qmin) + ")");

  const MassEnergy me = mass_energy(q, alpha);
  double decay = std::numeric_limits<double>::quiet_NaN();
  try {
    decay = decay_exponent_fit(q);
  } catch (const NumericalError&) {
    // Tail underflows inside the fit window; leave the exponent undefined.
  }
  return GroundStateBundle{alpha,     c,     std::move(q), residual, me.mass,
                           me.energy, decay, it, stabilizer, opts.dealias};
}

GroundStateBundle scale_ground_state(const GroundStateBundle& b, double c_new) {
  require(std::isfinite(c_new) && c_new > 0.0, "new speed must be positive");
  const double ratio = c_new / b.c;
  RealField q = affine_resample(b.Q, std::pow(ratio, 1.0 / b.alpha), {0.0, 0.0},
                                Outside::zero);
  q *= ratio;
  if (b.dealiased) q = dealias(q);
  const MassEnergy me = mass_energy(q, b.alpha);
  const double res = ground_state_residual(q, b.alpha, c_new, b.dealiased);
  double decay = std::numeric_limits<double>::quiet_NaN();
  try {
    decay = decay_exponent_fit(q);
  } catch (const NumericalError&) {
  }
  return GroundStateBundle{b.alpha,   c_new, std::move(q), res, me.mass,
                           me.energy, decay, 0, 1.0, b.dealiased};
}

double decay_exponent_fit(const RealField& f, double lo, double hi) {
  const GridSpec& g = f.grid();
  const double L = g.length(0);
  const int jc = g.dim() == 2 ? g.ny() / 2 : 0;
  std::vector<double> r, y;
  for (int i = g.nx() / 2 + 1; i < g.nx(); ++i) {
    const double x = g.coordinate(0, i);
    if (x < lo * L || x > hi * L) continue;
    const double v = std::abs(f.at(i, jc));
    if (v < 1e-14) continue;
    r.push_back(x);
    y.push_back(v);
  }
  if (r.size() < 3)
    throw NumericalError("decay fit window has fewer than three samples above 1e-14");
  return fit_periodized_power_law(r, y, L, g.dim()).exponent;
}

MassEnergy mass_energy(const RealField& u, double alpha) {
  double cubic = 0.0;
  for (double v : u.values()) cubic += v * v * v;
  cubic *= u.grid().cell_volume();
  return {l2_norm_squared(u),
          0.5 * homogeneous_half_energy(u, alpha) - cubic / 6.0};
}

PohozaevTerms pohozaev_check(const RealField& Q, double alpha) {
  PohozaevTerms p;
  p.dispersive = homogeneous_half_energy(Q, alpha);
  for (double v : Q.values()) p.cubic += v * v * v;
  p.cubic *= Q.grid().cell_volume();
  const double target = Q.grid().dim() * p.cubic / (6.0 * alpha);
  p.slack = std::abs(p.dispersive - target) / std::abs(target);
  return p;
}

}  // namespace fdisp
