#include "fdisp/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "fdisp/error.hpp"
#include "fdisp/evolution.hpp"
#include "fdisp/fourier.hpp"
#include "fdisp/resample.hpp"

namespace fdisp {
namespace {

struct Solve2 {
  double x = 0.0, y = 0.0, det = 0.0;
};

Solve2 solve2(double a11, double a12, double a21, double a22, double b1,
              double b2) {
  Solve2 r;
  r.det = a11 * a22 - a12 * a21;
  if (r.det == 0.0 || !std::isfinite(r.det)) return r;
  r.x = (b1 * a22 - a12 * b2) / r.det;
  r.y = (a11 * b2 - a21 * b1) / r.det;
  return r;
}

RealField zeros_like(const RealField& f) { return RealField(f.grid()); }

// x . grad f (x from the box centre).
RealField x_dot_grad(const RealField& f) {
  RealField out = scaling_generator(f);
  out -= f;
  return out;
}

}  // namespace

ModulationProfiles make_profiles(const RealField& Q, const RealField& psi0,
                                 double mu0, bool dealiased) {
  require_same_grid(Q, psi0);
  require(mu0 > 0.0, "make_profiles: mu0 must be positive");
  const bool two_d = Q.grid().dim() == 2;
  const RealField d1Q = partial_derivative(Q, Axis::x1);
  const RealField d1psi0 = partial_derivative(psi0, Axis::x1);
  const RealField d11Q = partial_derivative(d1Q, Axis::x1);
  ModulationProfiles p{
      .Q = Q,
      .psi0 = psi0,
      .d1Q = d1Q,
      .d2Q = two_d ? partial_derivative(Q, Axis::x2) : zeros_like(Q),
      .d11Q = d11Q,
      .d1psi0 = d1psi0,
      .x_grad_d1Q = x_dot_grad(d1Q),
      .x_grad_psi0 = x_dot_grad(psi0),
      .L_d1psi0 = apply_L(d1psi0, Q, dealiased),
      .d1Q_squared = d1Q * d1Q,
      .mu0 = mu0,
      .d1Q_norm2 = l2_norm_squared(d1Q),
      .psi0_Q = inner(psi0, Q),
      .Q_half_norm = sobolev_half_norm(Q),
      .dealiased = dealiased,
  };
  return p;
}

RealField rescaled_field(const RealField& u, double lambda, const Point& z) {
  require(lambda > 0.0, "rescaled_field: lambda must be positive");
  RealField v = affine_resample(u, lambda, z, Outside::periodic);
  v *= lambda;
  return v;
}

RealField profile_at(const RealField& f, double lambda, const Point& z) {
  require(lambda > 0.0, "profile_at: lambda must be positive");
  RealField g = affine_resample(f, 1.0 / lambda, {0.0, 0.0}, Outside::zero);
  g *= 1.0 / lambda;
  if (z[0] != 0.0 || z[1] != 0.0) g = translate(g, z);
  return g;
}

ModulationState modulation_fit(const RealField& u, const ModulationProfiles& p,
                               double lambda0, double z1_0,
                               const FitOptions& opts) {
  require_same_grid(u, p.Q);
  require(lambda0 > 0.0, "modulation_fit: initial lambda must be positive");
  const double nQ = l2_norm(p.Q);
  const double n1 = std::sqrt(p.d1Q_norm2);
  const double n2 = l2_norm(p.psi0);

  ModulationState st{.epsilon = RealField(u.grid())};
  st.lambda = lambda0;
  st.z1 = z1_0;
  bool converged = false;
  double last_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= opts.max_iterations; ++it) {
    const RealField v = rescaled_field(u, st.lambda, {st.z1, 0.0});
    st.epsilon = v - p.Q;
    const double g1 = inner(st.epsilon, p.d1Q);
    const double g2 = inner(st.epsilon, p.psi0);
    st.iterations = it;
    const double r1 = std::abs(g1) / (n1 * nQ);
    const double r2 = std::abs(g2) / (n2 * nQ);
    // Rounding in the resampling puts a floor near 1e-15 on the residuals;
    // a vanishing Newton step with small residuals is accepted as well.
    if ((r1 <= opts.tolerance && r2 <= opts.tolerance) ||
        (last_step < 1e-13 && r1 < 1e-10 && r2 < 1e-10)) {
      converged = true;
      break;
    }
    if (it == opts.max_iterations) break;
    const RealField Lv = scaling_generator(v);
    const RealField dv = partial_derivative(v, Axis::x1);
    const double inv = 1.0 / st.lambda;
    const Solve2 step =
        solve2(inner(Lv, p.d1Q) * inv, inner(dv, p.d1Q) * inv,
               inner(Lv, p.psi0) * inv, inner(dv, p.psi0) * inv, -g1, -g2);
    if (step.det == 0.0)
      throw NumericalError("modulation_fit: singular Jacobian");
    double dl = step.x;
    double dz = step.y;
    // Keep lambda positive and steps moderate far from the solution.
    const double damp = std::min(
        {1.0, 0.2 * st.lambda / std::max(std::abs(dl), 1e-300),
         2.0 / std::max(std::abs(dz), 1e-300)});
    dl *= damp;
    dz *= damp;
    st.lambda += dl;
    st.z1 += dz;
    last_step = std::abs(dl) / st.lambda + std::abs(dz);
  }
  if (!converged)
    throw NumericalError("modulation_fit: Newton did not converge in " +
                         std::to_string(opts.max_iterations) + " iterations");
  st.residuals = {inner(st.epsilon, p.d1Q), inner(st.epsilon, p.psi0),
                  inner(st.epsilon, p.d2Q)};
  const double eh = sobolev_half_norm(st.epsilon);
  if (eh > opts.tube_limit * p.Q_half_norm)
    throw NumericalError("modulation_fit: solution left the tube (||eps|| = " +
                         std::to_string(eh) + ")");
  return st;
}

TubeDistance tube_distance(const RealField& u, const RealField& Q) {
  require_same_grid(u, Q);
  const GridSpec& g = u.grid();
  const SpectralField uh = forward_transform(u);
  const SpectralField qh = forward_transform(Q);
  SpectralField w(g);
  const int half = g.nx() / 2 + 1;
  for (int j = 0; j < g.ny(); ++j) {
    const double k2 = g.dim() == 2 ? g.wavenumber(1, j) : 0.0;
    for (int i = 0; i < half; ++i) {
      const double k1 = g.wavenumber(0, i);
      w.at(i, j) = std::sqrt(1.0 + k1 * k1 + k2 * k2) * uh.at(i, j) *
                   std::conj(qh.at(i, j));
    }
  }
  // Correlation on grid displacements.
  const RealField c = inverse_transform(w);
  std::size_t best = 0;
  for (std::size_t k = 1; k < c.size(); ++k)
    if (c[k] > c[best]) best = k;
  const int bi = static_cast<int>(best % g.nx());
  const int bj = static_cast<int>(best / g.nx());
  Point d{g.mode(0, bi) * g.spacing(0),
          g.dim() == 2 ? g.mode(1, bj) * g.spacing(1) : 0.0};

  // Newton on C(d) = sum_k m_k Re(W_k e^{i k.d}).
  auto evaluate = [&](const Point& x, double& val, double grad[2],
                      double hess[3]) {
    val = 0.0;
    grad[0] = grad[1] = 0.0;
    hess[0] = hess[1] = hess[2] = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
      const double k2 = g.dim() == 2 ? g.wavenumber(1, j) : 0.0;
      for (int i = 0; i < half; ++i) {
        const double k1 = g.wavenumber(0, i);
        const double m = (i == 0 || i == g.nx() / 2) ? 1.0 : 2.0;
        const std::complex<double> z =
            w.at(i, j) * std::polar(1.0, k1 * x[0] + k2 * x[1]);
        val += m * z.real();
        grad[0] -= m * k1 * z.imag();
        grad[1] -= m * k2 * z.imag();
        hess[0] -= m * k1 * k1 * z.real();
        hess[1] -= m * k1 * k2 * z.real();
        hess[2] -= m * k2 * k2 * z.real();
      }
    }
  };
  double val = 0.0, grad[2], hess[3];
  for (int it = 0; it < 30; ++it) {
    evaluate(d, val, grad, hess);
    Solve2 s;
    if (g.dim() == 2) {
      s = solve2(hess[0], hess[1], hess[1], hess[2], -grad[0], -grad[1]);
    } else {
      s.det = hess[0];
      s.x = hess[0] != 0.0 ? -grad[0] / hess[0] : 0.0;
    }
    // Only follow the step near a maximum.
    if (s.det == 0.0 || hess[0] >= 0.0) break;
    const double len = std::hypot(s.x, s.y);
    const double cap = g.spacing(0);
    const double f = len > cap ? cap / len : 1.0;
    d[0] += f * s.x;
    d[1] += f * s.y;
    if (len < 1e-13) break;
  }
  evaluate(d, val, grad, hess);
  const double scale = g.cell_volume() / static_cast<double>(g.size());
  const double c_best = val * scale;
  const double dist2 =
      sobolev_half_norm_squared(u) + sobolev_half_norm_squared(Q) - 2.0 * c_best;
  TubeDistance r;
  r.distance = std::sqrt(std::max(dist2, 0.0));
  r.shift = d;
  return r;
}

EpsilonEnergy epsilon_mass_energy(const RealField& eps, const RealField& Q) {
  require_same_grid(eps, Q);
  EpsilonEnergy r;
  const double eq = inner(eps, Q);
  const double ee = l2_norm_squared(eps);
  r.eps_mass = 2.0 * eq + ee;
  r.energy = mass_energy(Q + eps, 1.0).energy;
  const double EQ = mass_energy(Q, 1.0).energy;
  const double Lee = inner(apply_L(eps, Q), eps);
  double cube = 0.0;
  for (std::size_t k = 0; k < eps.size(); ++k)
    cube += eps[k] * eps[k] * eps[k];
  cube *= eps.grid().cell_volume();
  r.energy_linearized = EQ + 0.5 * Lee - eq - 0.5 * ee - cube / 6.0;
  const double scale = std::abs(EQ) + 0.5 * std::abs(Lee) + std::abs(eq) +
                       0.5 * ee + std::abs(cube) / 6.0;
  r.linearization_residual =
      std::abs(r.energy - r.energy_linearized) / std::max(scale, 1e-300);
  return r;
}

double J_A_functional(const RealField& eps, const RealField& F, double A) {
  require_same_grid(eps, F);
  require(A >= 1.0, "J_A: A must be at least 1");
  const GridSpec& g = eps.grid();
  double sum = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      sum += eps.at(i, j) * F.at(i, j) *
             cutoff_profile(std::abs(g.coordinate(0, i)), A);
  return sum * g.cell_volume();
}

double K_A_functional(double J_A, double lambda, double kappa) {
  return lambda * (J_A - kappa);
}

RealField eta_field(const RealField& u, double lambda, double z1,
                    const RealField& Q) {
  require_same_grid(u, Q);
  return u - profile_at(Q, lambda, {z1, 0.0});
}

std::vector<double> eta_marginal(const RealField& eta, double z1) {
  const RealField e = z1 != 0.0 ? translate(eta, {-z1, 0.0}) : eta;
  const GridSpec& g = e.grid();
  const double h2 = g.dim() == 2 ? g.spacing(1) : 1.0;
  std::vector<double> m(static_cast<std::size_t>(g.nx()), 0.0);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) m[i] += e.at(i, j) * e.at(i, j) * h2;
  return m;
}

double right_mass_from_marginal(const std::vector<double>& marginal,
                                const GridSpec& grid, double x0) {
  require(marginal.size() == static_cast<std::size_t>(grid.nx()),
          "right_mass: marginal does not match the grid");
  require(x0 < 0.5 * grid.length(0), "right_mass: x0 lies beyond the box");
  double sum = 0.0;
  for (int i = 0; i < grid.nx(); ++i)
    if (grid.coordinate(0, i) > x0) sum += marginal[i];
  return sum * grid.spacing(0);
}

double right_mass(const RealField& eta, double x0, double z1) {
  return right_mass_from_marginal(eta_marginal(eta, z1), eta.grid(), x0);
}

double weighted_eps_mass(const RealField& eps, double m) {
  const GridSpec& g = eps.grid();
  double sum = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double x = g.coordinate(0, i);
      if (x > 0.0)
        sum += std::pow(1.0 + x * x, 0.5 * m) * eps.at(i, j) * eps.at(i, j);
    }
  return sum * g.cell_volume();
}

MonotoneSeries monotone_J_x0t0(const std::vector<EtaSnapshot>& snapshots,
                               const GridSpec& grid, double x0, double t0,
                               double nu, const WeightParams& w) {
  require(!snapshots.empty(), "monotone functionals: no snapshots");
  std::size_t k0 = snapshots.size();
  for (std::size_t k = 0; k < snapshots.size(); ++k)
    if (std::abs(snapshots[k].t - t0) <= 1e-9 * std::max(1.0, std::abs(t0)))
      k0 = k;
  if (k0 == snapshots.size())
    throw ValidationError("monotone functionals: t0 is not a snapshot time");
  const double z10 = snapshots[k0].z1;
  const double h = grid.spacing(0);
  MonotoneSeries r;
  for (std::size_t k = 0; k <= k0; ++k) {
    const EtaSnapshot& s = snapshots[k];
    require(s.marginal.size() == static_cast<std::size_t>(grid.nx()),
            "monotone functionals: marginal does not match the grid");
    const double lag = t0 - s.t;
    const double base = varphi({-nu * lag - x0, 0.0}, w);
    double J = 0.0, R = 0.0;
    for (int i = 0; i < grid.nx(); ++i) {
      const double x = grid.coordinate(0, i);
      J += s.marginal[i] * varphi({x + s.z1 - z10 + 0.5 * lag - x0, 0.0}, w);
      R += s.marginal[i] * (varphi({x - nu * lag - x0, 0.0}, w) - base);
    }
    r.t.push_back(s.t);
    r.J.push_back(J * h);
    r.rho.push_back(R * h);
  }
  const double J0 = r.J.back();
  const double R0 = r.rho.back();
  for (std::size_t k = 0; k < r.J.size(); ++k) {
    r.max_J_drop = std::max(r.max_J_drop, J0 - r.J[k]);
    r.max_rho_rise = std::max(r.max_rho_rise, R0 - r.rho[k]);
  }
  return r;
}

ModulationRates modulation_rates(const RealField& eps,
                                 const ModulationProfiles& p) {
  require_same_grid(eps, p.Q);
  const RealField e2 = eps * eps;
  const double a11 = -inner(p.x_grad_d1Q, eps);
  const double a12 = p.d1Q_norm2 - inner(p.d11Q, eps);
  const double a21 = p.psi0_Q / p.mu0 - inner(p.x_grad_psi0, eps);
  const double a22 = -inner(p.d1psi0, eps);
  const double b1 = inner(p.d1Q_squared, eps) - 0.5 * inner(e2, p.d11Q);
  const double b2 = inner(p.L_d1psi0, eps) - 0.5 * inner(p.d1psi0, e2);
  const Solve2 s = solve2(a11, a12, a21, a22, b1, b2);
  const double ref = p.d1Q_norm2 * std::abs(p.psi0_Q / p.mu0);
  if (!(std::abs(s.det) > 1e-3 * ref))
    throw NumericalError("modulation_rates: singular modulation system");
  return {s.x, s.y, s.det};
}

std::vector<double> finite_difference(const std::vector<double>& x,
                                      const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2,
          "finite_difference: need two or more matching samples");
  const std::size_t n = x.size();
  std::vector<double> d(n);
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return d;
  }
  // Slope at x[at] of the parabola through samples a, b, c.
  auto slope = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t at) {
    const double t = x[at];
    return y[a] * ((t - x[b]) + (t - x[c])) / ((x[a] - x[b]) * (x[a] - x[c])) +
           y[b] * ((t - x[a]) + (t - x[c])) / ((x[b] - x[a]) * (x[b] - x[c])) +
           y[c] * ((t - x[a]) + (t - x[b])) / ((x[c] - x[a]) * (x[c] - x[b]));
  };
  d[0] = slope(0, 1, 2, 0);
  d[n - 1] = slope(n - 3, n - 2, n - 1, n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = slope(i - 1, i, i + 1, i);
  return d;
}

OdeResidualReport modulation_ode_residual(const std::vector<double>& s,
                                          const std::vector<double>& lambda,
                                          const std::vector<double>& z1,
                                          const std::vector<double>& a,
                                          const std::vector<double>& b,
                                          const std::vector<double>& eps_l2,
                                          double s_lo, double s_hi) {
  const std::size_t n = s.size();
  require(lambda.size() == n && z1.size() == n && a.size() == n &&
              b.size() == n && eps_l2.size() == n && n >= 3,
          "modulation_ode_residual: series must match and have 3+ samples");
  const std::vector<double> dl = finite_difference(s, lambda);
  const std::vector<double> dz = finite_difference(s, z1);
  OdeResidualReport r;
  for (std::size_t i = 0; i < n; ++i) {
    if (eps_l2[i] > 0.0)
      r.max_bound_ratio =
          std::max(r.max_bound_ratio, (std::abs(a[i]) + std::abs(b[i])) /
                                          (eps_l2[i] + eps_l2[i] * eps_l2[i]));
    if (i == 0 || i + 1 == n || s[i] < s_lo || s[i] > s_hi) continue;
    const double a_fd = dl[i] / lambda[i];
    const double b_fd = dz[i] / lambda[i] - 1.0;
    const double den = std::abs(a[i]) + std::abs(b[i]);
    if (den <= 0.0) continue;
    r.max_discrepancy =
        std::max(r.max_discrepancy,
                 (std::abs(a_fd - a[i]) + std::abs(b_fd - b[i])) / den);
    ++r.samples;
  }
  return r;
}

void InstabilityConfig::validate(const GridSpec& grid) const {
  require(grid.dim() == 2, "instability: a two-dimensional grid is required");
  require(n_index >= 1, "instability: n must be at least 1");
  require(s_end > 0.0, "instability: s_end must be positive");
  require(dt > 0.0, "instability: dt must be positive");
  require(fit_interval >= dt, "instability: fit_interval must be >= dt");
  require(A >= 1.0, "instability: A must be at least 1");
  for (double x0 : x0_list)
    require(x0 > 0.0 && x0 < 0.5 * grid.length(0),
            "instability: every x0 must lie in (0, Lx/2)");
  require(m_exponent > 0.0, "instability: m must be positive");
  require(weight_scale > 0.0, "instability: weight scale must be positive");
  require(weight_gamma > 0.5, "instability: weight gamma must exceed 1/2");
  require(nu > 0.0 && nu < 0.375, "instability: nu must lie in (0, 3/8)");
  require(tube_limit > 0.0, "instability: tube limit must be positive");
}

InstabilityResult instability_experiment(const GroundStateBundle& gs,
                                         const SpectrumBundle& spectrum,
                                         const InstabilityConfig& cfg) {
  const GridSpec& grid = gs.grid();
  cfg.validate(grid);
  require(gs.alpha == 1.0, "instability: the ground state must have alpha = 1");
  const RealField& Q = gs.Q;
  const ModulationProfiles prof =
      make_profiles(Q, spectrum.psi0, spectrum.mu0, gs.dealiased);
  const InstabilityData data =
      build_instability_data(Q, spectrum.psi0, cfg.n_index, cfg.flip_sign);
  const RealField F = F_field(Q, cfg.F_edge_tolerance);

  InstabilityResult res;
  res.kappa = kappa_constant(Q);
  res.lower_bound = lower_bound_constant(Q, spectrum.psi0, cfg.n_index);
  res.cauchy_schwarz_gap = 8.0 * cfg.n_index * res.lower_bound;

  SimConfig sc;
  sc.alpha = 1.0;
  sc.grid = grid;
  sc.dt = cfg.dt;
  sc.t_end = std::max(cfg.dt, cfg.fit_interval);
  sc.dealias = gs.dealiased;
  const Integrator integ(sc);
  SimState state = integ.initial_state(data.u0);
  const double u_mass = l2_norm_squared(state.u);
  res.energy_u0 = mass_energy(state.u, 1.0).energy;
  res.dispersive_u0 = 0.5 * homogeneous_half_energy(state.u, 1.0);
  const double tube0 = tube_distance(state.u, Q).distance;
  const int steps_per_fit =
      std::max(1, static_cast<int>(std::llround(cfg.fit_interval / cfg.dt)));

  FitOptions fo;
  fo.tube_limit = cfg.tube_limit;
  WeightParams wp;
  wp.gamma = cfg.weight_gamma;
  wp.m_scale = cfg.weight_scale;

  double s = 0.0, t_prev = 0.0, lam_prev = 1.0;
  double z_prev = 0.0, z_prev2 = 0.0;
  for (;;) {
    std::optional<ModulationState> fitted;
    try {
      const double guess =
          res.records.size() >= 2 ? 2.0 * z_prev - z_prev2 : z_prev;
      fitted = modulation_fit(state.u, prof, lam_prev, guess, fo);
    } catch (const NumericalError& e) {
      res.left_tube = true;
      res.reason = e.what();
      break;
    }
    const ModulationState& fit = *fitted;
    if (!res.records.empty())
      s += 0.5 * (1.0 / (lam_prev * lam_prev) +
                  1.0 / (fit.lambda * fit.lambda)) *
           (state.t - t_prev);
    VirialRecord rec;
    rec.t = state.t;
    rec.s = s;
    rec.lambda = fit.lambda;
    rec.z1 = fit.z1;
    rec.J_A = J_A_functional(fit.epsilon, F, cfg.A);
    rec.K_A = K_A_functional(rec.J_A, fit.lambda, res.kappa);
    rec.tube_distance = tube_distance(state.u, Q).distance;
    rec.eps_l2 = l2_norm(fit.epsilon);
    rec.eps_half = sobolev_half_norm(fit.epsilon);
    const EpsilonEnergy en = epsilon_mass_energy(fit.epsilon, Q);
    rec.eps_mass = en.eps_mass;
    rec.eps_Q = inner(fit.epsilon, Q);
    rec.energy = en.energy;
    rec.energy_scaled = fit.lambda * res.energy_u0;
    rec.energy_linearization_residual = en.linearization_residual;
    const ModulationRates mr = modulation_rates(fit.epsilon, prof);
    rec.a_ode = mr.a;
    rec.b_ode = mr.b;
    rec.weighted_mass = weighted_eps_mass(fit.epsilon, cfg.m_exponent);
    const RealField eta = eta_field(state.u, fit.lambda, fit.z1, Q);
    EtaSnapshot snap{state.t, fit.z1, eta_marginal(eta, fit.z1)};
    for (double x0 : cfg.x0_list)
      rec.right_mass.push_back(right_mass_from_marginal(snap.marginal, grid, x0));
    if (cfg.keep_snapshots) res.snapshots.push_back(std::move(snap));
    res.records.push_back(std::move(rec));

    t_prev = state.t;
    lam_prev = fit.lambda;
    z_prev2 = z_prev;
    z_prev = fit.z1;
    if (s >= cfg.s_end) break;
    if (fit.lambda < 1e-3) {
      res.blew_up = true;
      res.reason = "scaling parameter collapsed";
      break;
    }
    bool ok = true;
    for (int k = 0; k < steps_per_fit; ++k) {
      auto next = integ.step(state);
      if (!next) {
        ok = false;
        break;
      }
      state = std::move(*next);
    }
    if (!ok) {
      res.blew_up = true;
      res.reason = "solution became non-finite or exceeded 1e6";
      break;
    }
  }
  if (res.records.empty())
    throw NumericalError("instability: the initial modulation fit failed: " +
                         res.reason);

  auto& rec = res.records;
  const std::size_t n = rec.size();
  res.s_last = rec.back().s;
  std::vector<double> sv(n), kv(n);
  for (std::size_t i = 0; i < n; ++i) {
    sv[i] = rec[i].s;
    kv[i] = rec[i].K_A;
  }
  if (n >= 2) {
    const std::vector<double> dk = finite_difference(sv, kv);
    for (std::size_t i = 0; i < n; ++i) rec[i].dK_ds = dk[i];
  }
  auto first_at = [&](double target) {
    for (std::size_t i = 0; i < n; ++i)
      if (sv[i] >= target) return i;
    return n - 1;
  };
  const std::size_t i2 = first_at(std::min(2.0, res.s_last));
  if (i2 > 0) res.early_dK_ds = (kv[i2] - kv[0]) / (sv[i2] - sv[0]);
  if (n - 1 > i2 && res.s_last >= 2.0)
    res.avg_dK_ds = (kv[n - 1] - kv[i2]) / (sv[n - 1] - sv[i2]);
  else
    res.avg_dK_ds = res.early_dK_ds;

  res.K_increasing = n >= 2;
  for (std::size_t i = 1; i < n; ++i)
    if (!(kv[i] > kv[i - 1])) res.K_increasing = false;
  const double mass0 = rec[0].eps_mass;
  for (const VirialRecord& r : rec) {
    if (tube0 > 0.0)
      res.max_tube_ratio = std::max(res.max_tube_ratio, r.tube_distance / tube0);
    res.mass_drift =
        std::max(res.mass_drift, std::abs(r.eps_mass - mass0) / u_mass);
    res.energy_drift = std::max(
        res.energy_drift,
        std::abs(r.energy - r.energy_scaled) / res.dispersive_u0);
    res.max_linearization_residual = std::max(res.max_linearization_residual,
                                              r.energy_linearization_residual);
  }

  if (res.blew_up && res.s_last < 2.0) {
    res.verdict = "BLOWUP";
    return res;
  }
  const bool growth = res.avg_dK_ds > 0.0;
  const bool escape = res.max_tube_ratio > 3.0 || res.K_increasing ||
                      res.left_tube;
  res.verdict = growth && escape ? "PASS" : "FAIL";
  if (res.reason.empty())
    res.reason = std::string(growth ? "K_A grows" : "K_A does not grow") +
                 (escape ? ", escape detected" : ", no escape detected");
  return res;
}

}  // namespace fdisp
