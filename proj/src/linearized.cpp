#include "fdisp/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <random>
#include <vector>

#include "fdisp/error.hpp"
#include "fdisp/fourier.hpp"

namespace fdisp {
namespace {

void require_2d_pair(const RealField& f, const RealField& Q) {
  require_same_grid(f, Q);
}

double spectrum_floor_shift(const RealField& Q) {
  const double qmax = *std::max_element(Q.values().begin(), Q.values().end());
  // L >= 1 - max Q pointwise; stay half a unit below that.
  return 1.0 - std::max(qmax, 0.0) - 0.5;
}

RealField normalized(RealField f) {
  const double n = l2_norm(f);
  if (!(n > 0.0)) throw NumericalError("cannot normalize a zero field");
  f *= 1.0 / n;
  return f;
}

int neg_index(int i, int n) { return (n - i) % n; }

}  // namespace

RealField apply_L(const RealField& f, const RealField& Q, bool dealiased) {
  require_2d_pair(f, Q);
  RealField out = fractional_power(f, 1.0);
  if (dealiased) {
    RealField qf = dealias(f);
    qf *= Q;
    qf = dealias(qf);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += f[k] - qf[k];
    return out;
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += f[k] - Q[k] * f[k];
  return out;
}

RealField solve_shifted_L(const RealField& b, const RealField& Q, double shift,
                          int max_iterations, double tolerance,
                          int* iterations, bool dealiased) {
  require_same_grid(b, Q);
  const double offset = 1.0 - shift;
  auto apply = [&](const RealField& v) {
    RealField out = apply_L(v, Q, dealiased);
    out.axpy(-shift, v);
    return out;
  };
  auto precondition = [&](const RealField& r) {
    return apply_multiplier(
        r,
        [offset](double k1, double k2) -> std::complex<double> {
          return 1.0 / (std::hypot(k1, k2) + offset);
        },
        Parity::even);
  };
  RealField x(b.grid());
  RealField r = b;
  RealField z = precondition(r);
  RealField p = z;
  double rz = inner(r, z);
  const double bnorm = l2_norm(b);
  int it = 0;
  if (bnorm == 0.0) {
    if (iterations != nullptr) *iterations = 0;
    return x;
  }
  for (; it < max_iterations; ++it) {
    if (l2_norm(r) <= tolerance * bnorm) break;
    const RealField ap = apply(p);
    const double pap = inner(p, ap);
    if (!(pap > 0.0))
      throw NumericalError("shifted operator is not positive definite");
    const double step = rz / pap;
    x.axpy(step, p);
    r.axpy(-step, ap);
    z = precondition(r);
    const double rz_new = inner(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = z[k] + beta * p[k];
  }
  if (iterations != nullptr) *iterations = it;
  return x;
}

SpectrumBundle lowest_eigenpair(const RealField& Q, const EigenOptions& opts) {
  require(Q.grid().dim() == 2, "the linearized operator is two-dimensional");
  const double shift = spectrum_floor_shift(Q);
  RealField v = normalized(Q);
  double theta = 0.0;
  double residual = 1.0;
  int it = 0;
  for (; it < opts.max_outer; ++it) {
    const RealField lv = apply_L(v, Q, opts.dealiased);
    theta = inner(v, lv);
    RealField r = lv;
    r.axpy(-theta, v);
    residual = l2_norm(r);
    if (residual < opts.tolerance) break;
    v = normalized(solve_shifted_L(v, Q, shift, opts.max_cg, opts.cg_tolerance,
                                   nullptr, opts.dealiased));
  }
  if (residual >= opts.tolerance)
    throw NumericalError("eigen-iteration stagnated (residual " +
                         std::to_string(residual) + ")");
  if (theta >= 0.0)
    throw NumericalError("lowest eigenvalue of L is not negative; check Q");
  const GridSpec& g = Q.grid();
  if (v.at(g.nx() / 2, g.ny() / 2) < 0.0) v *= -1.0;

  SpectrumBundle out{-theta, v, residual, it, 0.0, 0.0, 0.0};
  const RealField d1 = partial_derivative(Q, Axis::x1);
  const RealField d2 = partial_derivative(Q, Axis::x2);
  out.kernel_residual_x1 = l2_norm(apply_L(d1, Q, opts.dealiased)) / l2_norm(d1);
  out.kernel_residual_x2 = l2_norm(apply_L(d2, Q, opts.dealiased)) / l2_norm(d2);
  return out;
}

double second_radial_eigenvalue(const RealField& Q, const RealField& psi0,
                                int iterations, bool dealiased) {
  const double shift = spectrum_floor_shift(Q);
  auto deflate = [&](RealField f) {
    f.axpy(-inner(f, psi0) / inner(psi0, psi0), psi0);
    return f;
  };
  RealField v = normalized(deflate(RealField::from_function(
      Q.grid(), [](const Point& x) {
        return std::exp(-(x[0] * x[0] + x[1] * x[1]) / 16.0);
      })));
  for (int it = 0; it < iterations; ++it)
    v = normalized(
        deflate(solve_shifted_L(v, Q, shift, 400, 1e-10, nullptr, dealiased)));
  return inner(v, apply_L(v, Q, dealiased));
}

double rotation_asymmetry(const RealField& f) {
  const GridSpec& g = f.grid();
  require(g.dim() == 2 && g.nx() == g.ny() && g.length(0) == g.length(1),
          "rotation check needs a square grid");
  const int n = g.nx();
  const double norm = l2_norm(f);
  double worst = 0.0;
  for (int kind = 0; kind < 3; ++kind) {
    RealField r(g);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        switch (kind) {
          case 0: r.at(i, j) = f.at(j, neg_index(i, n)); break;
          case 1: r.at(i, j) = f.at(neg_index(i, n), neg_index(j, n)); break;
          default: r.at(i, j) = f.at(j, i); break;
        }
      }
    worst = std::max(worst, l2_norm(r - f) / norm);
  }
  return worst;
}

double coercivity_ratio(const RealField& f, const RealField& Q,
                        bool dealiased) {
  return inner(apply_L(f, Q, dealiased), f) / sobolev_half_norm_squared(f);
}

RealField random_smooth_field(const GridSpec& grid, std::uint64_t seed,
                              int bumps) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre1(-grid.length(0) / 4,
                                                 grid.length(0) / 4);
  std::uniform_real_distribution<double> centre2(
      grid.dim() == 2 ? -grid.length(1) / 4 : 0.0,
      grid.dim() == 2 ? grid.length(1) / 4 : 0.0);
  std::uniform_real_distribution<double> width(1.0, 4.0);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  RealField out(grid);
  for (int b = 0; b < bumps; ++b) {
    const double c1 = centre1(rng), c2 = centre2(rng);
    const double w = width(rng), a = amp(rng);
    for (std::size_t k = 0; k < out.size(); ++k) {
      const Point x = grid.point(k);
      const double d1 = x[0] - c1, d2 = x[1] - c2;
      out[k] += a * std::exp(-(d1 * d1 + d2 * d2) / (w * w));
    }
  }
  return out;
}

RealField project_out(const RealField& f, const RealField& Q,
                      const RealField& psi0) {
  std::vector<RealField> basis;
  for (RealField v : {partial_derivative(Q, Axis::x1),
                      partial_derivative(Q, Axis::x2), psi0}) {
    for (const RealField& e : basis) v.axpy(-inner(v, e), e);
    basis.push_back(normalized(std::move(v)));
  }
  RealField out = f;
  for (int pass = 0; pass < 2; ++pass)
    for (const RealField& e : basis) out.axpy(-inner(out, e), e);
  return out;
}

double coercivity_probe(const RealField& Q, const RealField& psi0, int trials,
                        std::uint64_t seed, bool dealiased) {
  require(trials > 0, "coercivity probe needs at least one trial");
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const RealField f =
        project_out(random_smooth_field(Q.grid(), seed + static_cast<std::uint64_t>(t)),
                    Q, psi0);
    worst = std::min(worst, coercivity_ratio(f, Q, dealiased));
  }
  return worst;
}

double gagliardo_nirenberg_ratio(const RealField& f) {
  double cubic = 0.0;
  for (double v : f.values()) cubic += std::abs(v * v * v);
  cubic *= f.grid().cell_volume();
  return cubic / (homogeneous_half_energy(f, 1.0) * l2_norm(f));
}

double minimal_index(const RealField& Q, const RealField& psi0, double delta) {
  require(delta > 0.0, "tube radius must be positive");
  return (1.0 + sobolev_half_norm(psi0) / l2_norm(psi0)) * sobolev_half_norm(Q) /
         delta;
}

InstabilityData build_instability_data(const RealField& Q,
                                       const RealField& psi0, int n_index,
                                       bool flip_sign,
                                       std::optional<double> tube_radius) {
  require(n_index > 0, "n_index must be positive");
  if (tube_radius)
    require(n_index >= minimal_index(Q, psi0, *tube_radius),
            "n_index is below the minimal index for this tube radius");
  const double a = -inner(psi0, Q) / inner(psi0, psi0);
  RealField eps = Q;
  eps.axpy(a, psi0);
  eps *= (flip_sign ? -1.0 : 1.0) / n_index;
  eps = project_out(eps, Q, psi0);

  double worst = 0.0;
  const double en = l2_norm(eps);
  for (const RealField& v : {partial_derivative(Q, Axis::x1),
                             partial_derivative(Q, Axis::x2), psi0})
    worst = std::max(worst, std::abs(inner(eps, v)) / (en * l2_norm(v)));
  if (worst > 1e-6)
    throw NumericalError("initial perturbation is not orthogonal (" +
                         std::to_string(worst) + ")");
  RealField u0 = Q + eps;
  return InstabilityData{n_index, a, std::move(eps), std::move(u0), worst};
}

double lower_bound_constant(const RealField& Q, const RealField& psi0,
                            int n_index) {
  const double qp = inner(Q, psi0);
  return (l2_norm_squared(Q) - qp * qp / l2_norm_squared(psi0)) /
         (8.0 * n_index);
}

}  // namespace fdisp
