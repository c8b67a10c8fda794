#include "fdisp/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "fdisp/error.hpp"
#include "fdisp/fourier.hpp"
#include "fdisp/ground_state.hpp"

namespace fdisp {

using cplx = std::complex<double>;

void SimConfig::validate() const {
  require(alpha >= 1.0 && alpha <= 2.0, "alpha must lie in [1, 2]");
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  require(std::isfinite(t_end) && t_end > 0.0, "t_end must be positive");
  require(diagnostics_every > 0, "diagnostics_every must be positive");
  const double k1 = grid.max_wavenumber(0);
  const double k2 = grid.dim() == 2 ? grid.max_wavenumber(1) : 0.0;
  const double stiff = k1 * std::pow(std::hypot(k1, k2), alpha);
  if (dt * stiff > 10.0)
    throw ValidationError("dt * max|k1||k|^alpha = " +
                          std::to_string(dt * stiff) + " exceeds 10");
}

int SimConfig::steps() const {
  return static_cast<int>(std::llround(t_end / dt));
}

Integrator::Integrator(const SimConfig& config) : config_(config) {
  config_.validate();
  const GridSpec& g = config_.grid;
  const int half = g.nx() / 2 + 1;
  dispersion_.resize(g.spectral_size());
  k1_.resize(g.spectral_size());
  keep_.resize(g.spectral_size());
  for (int j = 0; j < g.ny(); ++j) {
    const double k2 = g.dim() == 2 ? g.wavenumber(1, j) : 0.0;
    for (int i = 0; i < half; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * half + i;
      const double k1 = g.wavenumber(0, i);
      const bool nyquist = i == g.nx() / 2;
      k1_[k] = nyquist ? 0.0 : k1;
      dispersion_[k] =
          nyquist ? 0.0 : k1 * std::pow(std::hypot(k1, k2), config_.alpha);
      keep_[k] = config_.dealias ? dealias_keeps(g, i, j) : 1;
    }
  }
  cached_ = coefficients(config_.dt);
}

Integrator::Coefficients Integrator::coefficients(double dt) const {
  const std::size_t m = dispersion_.size();
  Coefficients c;
  c.dt = dt;
  c.e.resize(m);
  c.e2.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    c.e2[k] = std::polar(1.0, 0.5 * dt * dispersion_[k]);
    c.e[k] = c.e2[k] * c.e2[k];
  }
  if (config_.scheme != Scheme::etdrk4) return c;

  // phi-type coefficients as contour means around z = dt * i k1 |k|^alpha,
  // which avoids the cancellation of the closed forms near z = 0.
  constexpr int contour = 32;
  std::array<cplx, contour> roots;
  for (int p = 0; p < contour; ++p)
    roots[p] = std::polar(1.0, 2.0 * std::numbers::pi * (p + 0.5) / contour);
  c.q.resize(m);
  c.f1.resize(m);
  c.f2.resize(m);
  c.f3.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const cplx z(0.0, dt * dispersion_[k]);
    cplx q{}, f1{}, f2{}, f3{};
    for (const cplx& w : roots) {
      const cplx r = z + w;
      const cplx er = std::exp(r);
      const cplx r3 = r * r * r;
      q += (std::exp(0.5 * r) - 1.0) / r;
      f1 += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
      f2 += (2.0 + r + er * (r - 2.0)) / r3;
      f3 += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
    }
    c.q[k] = dt * q / double(contour);
    c.f1[k] = dt * f1 / double(contour);
    c.f2[k] = dt * f2 / double(contour);
    c.f3[k] = dt * f3 / double(contour);
  }
  return c;
}

SimState Integrator::initial_state(const RealField& u0) const {
  require(u0.grid() == config_.grid, "initial data lives on a different grid");
  require(u0.all_finite(), "initial data has non-finite values");
  return SimState{0.0, config_.dealias ? dealias(u0) : u0, 0};
}

// out = scale * (-1/2) i k1 P(u^2)^
void Integrator::nonlinear(const Spectrum& uh, Spectrum& out,
                           double scale) const {
  const GridSpec& g = config_.grid;
  if (!config_.nonlinearity) {
    std::fill(out.begin(), out.end(), cplx{});
    return;
  }
  SpectralField s(g);
  std::copy(uh.begin(), uh.end(), s.coeffs().begin());
  RealField u = inverse_transform(s);
  for (double& v : u.values()) v *= v;
  const SpectralField w = forward_transform(u);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = keep_[k] ? cplx(0.0, -0.5 * scale * k1_[k]) * w[k] : cplx{};
}

std::optional<SimState> Integrator::step(const SimState& s) const {
  return step(s, config_.dt);
}

std::optional<SimState> Integrator::finish(const SimState& s, double dt,
                                           const Spectrum& uh) const {
  SpectralField out(config_.grid);
  std::copy(uh.begin(), uh.end(), out.coeffs().begin());
  RealField u = inverse_transform(out);
  for (double v : u.values())
    if (!std::isfinite(v) || std::abs(v) > 1e6) return std::nullopt;
  return SimState{s.t + dt, std::move(u), s.step_index + 1};
}

std::optional<SimState> Integrator::step(const SimState& s, double dt) const {
  require(s.u.grid() == config_.grid, "state lives on a different grid");
  const Coefficients fresh = dt == cached_.dt ? Coefficients{} : coefficients(dt);
  const Coefficients& co = dt == cached_.dt ? cached_ : fresh;
  const std::size_t m = config_.grid.spectral_size();
  const SpectralField u0 = forward_transform(s.u);
  const Spectrum v(u0.coeffs().begin(), u0.coeffs().end());
  Spectrum na(m), nb(m), nc(m), nd(m), a(m), b(m), c(m), out(m);

  if (config_.scheme == Scheme::ifrk4) {
    // Lawson RK4 in the interaction picture; stages carry the factor dt.
    nonlinear(v, na, dt);
    for (std::size_t k = 0; k < m; ++k) a[k] = co.e2[k] * (v[k] + 0.5 * na[k]);
    nonlinear(a, nb, dt);
    for (std::size_t k = 0; k < m; ++k) b[k] = co.e2[k] * v[k] + 0.5 * nb[k];
    nonlinear(b, nc, dt);
    for (std::size_t k = 0; k < m; ++k) c[k] = co.e[k] * v[k] + co.e2[k] * nc[k];
    nonlinear(c, nd, dt);
    for (std::size_t k = 0; k < m; ++k)
      out[k] = co.e[k] * v[k] +
               (co.e[k] * na[k] + 2.0 * co.e2[k] * (nb[k] + nc[k]) + nd[k]) / 6.0;
    return finish(s, dt, out);
  }

  nonlinear(v, na, 1.0);
  for (std::size_t k = 0; k < m; ++k) a[k] = co.e2[k] * v[k] + co.q[k] * na[k];
  nonlinear(a, nb, 1.0);
  for (std::size_t k = 0; k < m; ++k) b[k] = co.e2[k] * v[k] + co.q[k] * nb[k];
  nonlinear(b, nc, 1.0);
  for (std::size_t k = 0; k < m; ++k)
    c[k] = co.e2[k] * a[k] + co.q[k] * (2.0 * nc[k] - na[k]);
  nonlinear(c, nd, 1.0);
  for (std::size_t k = 0; k < m; ++k)
    out[k] = co.e[k] * v[k] + na[k] * co.f1[k] +
             2.0 * (nb[k] + nc[k]) * co.f2[k] + nd[k] * co.f3[k];
  return finish(s, dt, out);
}

DiagnosticSeries run(const SimConfig& config, const RealField& u0,
                     const std::vector<Observer>& observers,
                     const std::function<void(const SimState&)>& on_sample) {
  const Integrator integ(config);
  DiagnosticSeries series;
  series.columns = {"t", "mass", "energy", "mean"};
  for (const Observer& o : observers)
    series.columns.insert(series.columns.end(), o.columns.begin(),
                          o.columns.end());

  auto sample = [&](const SimState& s) {
    const MassEnergy me = mass_energy(s.u, config.alpha);
    std::vector<double> row{s.t, me.mass, me.energy, mean(s.u)};
    for (const Observer& o : observers) {
      const std::vector<double> v = o.evaluate(s.t, s.u);
      require(v.size() == o.columns.size(),
              "observer returned the wrong number of values");
      row.insert(row.end(), v.begin(), v.end());
    }
    series.rows.push_back(std::move(row));
    if (on_sample) on_sample(s);
  };

  SimState state = integ.initial_state(u0);
  sample(state);
  const int n = config.steps();
  for (int i = 1; i <= n; ++i) {
    std::optional<SimState> next = integ.step(state);
    if (!next) {
      series.blew_up = true;
      break;
    }
    state = std::move(*next);
    // Sample times are rebuilt from the step count to avoid drift.
    state.t = i * config.dt;
    if (i % config.diagnostics_every == 0 || i == n) sample(state);
  }
  series.last_state = std::move(state);
  return series;
}

double region_mass(const RealField& u, const std::array<double, 2>& sigma,
                   double beta, double c, double t) {
  const GridSpec& g = u.grid();
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Point x = g.point(k);
    if (sigma[0] * x[0] + sigma[1] * x[1] - c * t >= beta) sum += u[k] * u[k];
  }
  return sum * g.cell_volume();
}

}  // namespace fdisp
