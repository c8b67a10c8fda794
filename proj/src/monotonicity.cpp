#include "fdisp/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "fdisp/error.hpp"
#include "fdisp/fourier.hpp"

namespace fdisp {

double weighted_dispersion_form(const RealField& u, const RealField& weight,
                                double alpha) {
  require_same_grid(u, weight);
  const RealField du = dispersion_apply(u, alpha);
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) sum += u[k] * weight[k] * du[k];
  return sum * u.grid().cell_volume();
}

double commutator_form(const RealField& u, const WeightParams& w,
                       double alpha) {
  return weighted_dispersion_form(u, varphi_field(u.grid(), w), alpha);
}

double seam_level(const RealField& u) {
  const GridSpec& g = u.grid();
  const double top = max_abs(u);
  if (top == 0.0) return 0.0;
  double edge = std::abs(u.at(0, 0));
  if (g.dim() == 1) return edge / top;
  for (int j = 0; j < g.ny(); ++j) edge = std::max(edge, std::abs(u.at(0, j)));
  for (int i = 0; i < g.nx(); ++i) edge = std::max(edge, std::abs(u.at(i, 0)));
  return edge / top;
}

bool sigma_condition(double alpha, const std::array<double, 2>& sigma,
                     int dim) {
  const double rest = dim == 2 ? std::abs(sigma[1]) : 0.0;
  return sigma[0] > std::sqrt(alpha / (2.0 * (1.0 + alpha))) * rest;
}

Eigen::MatrixXd matrix_M_build(double alpha, const std::vector<double>& sigma) {
  require(!sigma.empty(), "sigma must have at least one component");
  const auto n = static_cast<Eigen::Index>(sigma.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  M(0, 0) = (1.0 + alpha) * sigma[0];
  for (Eigen::Index j = 1; j < n; ++j) {
    M(0, j) = M(j, 0) = 0.5 * alpha * sigma[static_cast<std::size_t>(j)];
    M(j, j) = sigma[0];
  }
  return M;
}

double matrix_M_min_eigenvalue(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool matrix_M_is_pd(const Eigen::MatrixXd& M) {
  return matrix_M_min_eigenvalue(M) > 0.0;
}

double default_c1(double alpha, const std::array<double, 2>& sigma, int dim) {
  std::vector<double> s{sigma[0]};
  if (dim == 2) s.push_back(sigma[1]);
  return 0.5 * matrix_M_min_eigenvalue(matrix_M_build(alpha, s));
}

Lemma1Terms lemma1_terms(const RealField& u, const WeightParams& w,
                         double alpha, bool corollary) {
  require(w.gamma > 0.5, "weight exponent gamma must exceed 1/2");
  require(w.sigma[0] != 0.0 || w.sigma[1] != 0.0, "sigma must be nonzero");
  require(w.m_scale > 0.0, "m_scale must be positive");
  const GridSpec& g = u.grid();
  RealField up = phi_weight_field(g, w);
  if (corollary) up *= std::sqrt(w.sigma[0] / w.m_scale);
  up *= u;
  Lemma1Terms t;
  t.lhs = commutator_form(u, w, alpha);
  t.smoothing_term = homogeneous_half_energy(up, alpha);
  t.mass_term = l2_norm_squared(up);
  t.seam = seam_level(u);
  return t;
}

double required_c2(const Lemma1Terms& t, double c1) {
  if (!(t.mass_term > 0.0)) return 0.0;
  return std::max(0.0, (t.lhs + c1 * t.smoothing_term) / t.mass_term);
}

namespace {

Lemma1Report make_report(const Lemma1Terms& t, double c1, double c2) {
  return Lemma1Report{t.lhs,
                      t.smoothing_term,
                      t.mass_term,
                      c1,
                      c2,
                      -t.lhs - c1 * t.smoothing_term + c2 * t.mass_term,
                      t.seam};
}

void require_sigma(double alpha, const WeightParams& w, int dim) {
  if (!sigma_condition(alpha, w.sigma, dim))
    throw ValidationError(
        "sigma violates sigma_1 > sqrt(alpha/(2(1+alpha))) |sigma'|");
}

}  // namespace

Lemma1Report lemma1_check(const RealField& u, const WeightParams& w,
                          double alpha, double c2,
                          std::optional<double> c1_override) {
  w.validate(alpha);
  require_sigma(alpha, w, u.grid().dim());
  const double c1 =
      c1_override.value_or(default_c1(alpha, w.sigma, u.grid().dim()));
  return make_report(lemma1_terms(u, w, alpha), c1, c2);
}

Lemma1Sweep lemma1_sweep(const std::vector<RealField>& probes,
                         const WeightParams& w, double alpha,
                         std::optional<double> c1_override, bool corollary,
                         bool admissible_gamma_only) {
  require(!probes.empty(), "probe family is empty");
  if (admissible_gamma_only) w.validate(alpha);
  const int dim = probes.front().grid().dim();
  require_sigma(alpha, w, dim);
  Lemma1Sweep out;
  out.c1 = c1_override.value_or(default_c1(alpha, w.sigma, dim) /
                                (corollary ? w.sigma[0] : 1.0));
  std::vector<Lemma1Terms> terms;
  terms.reserve(probes.size());
  for (const RealField& u : probes) {
    terms.push_back(lemma1_terms(u, w, alpha, corollary));
    out.c2 = std::max(out.c2, required_c2(terms.back(), out.c1));
    out.max_seam = std::max(out.max_seam, terms.back().seam);
  }
  out.min_slack = std::numeric_limits<double>::infinity();
  for (const Lemma1Terms& t : terms) {
    out.reports.push_back(make_report(t, out.c1, out.c2));
    out.min_slack = std::min(out.min_slack, out.reports.back().slack);
  }
  return out;
}

Lemma1Sweep corollary_sweep(const std::vector<RealField>& probes,
                            const WeightParams& w, double alpha,
                            std::optional<double> c1_override,
                            bool admissible_gamma_only) {
  return lemma1_sweep(probes, w, alpha, c1_override, true,
                      admissible_gamma_only);
}

std::vector<RealField> probe_family(const GridSpec& grid,
                                    const ProbeFamily& family) {
  const int count = family.count;
  require(count > 0, "probe count must be positive");
  require(family.min_width > 0.0 && family.max_width >= family.min_width,
          "probe widths must be positive and ordered");
  require(family.dilation > 0.0, "probe dilation must be positive");
  std::mt19937_64 rng(family.seed);
  const bool two = grid.dim() == 2;
  const double f = family.centre_fraction;
  const double d = family.dilation;
  std::uniform_real_distribution<double> c1(-f * grid.length(0),
                                            f * grid.length(0));
  std::uniform_real_distribution<double> c2(two ? -f * grid.length(1) : 0.0,
                                            two ? f * grid.length(1) : 0.0);
  std::uniform_real_distribution<double> width(family.min_width,
                                               family.max_width);
  std::uniform_int_distribution<int> kind(0, two ? 4 : 2);
  std::vector<RealField> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int p = 0; p < count; ++p) {
    const double a1 = c1(rng), a2 = c2(rng);
    const double w1 = width(rng), w2 = width(rng);
    const int k = kind(rng);
    out.push_back(RealField::from_function(grid, [&](const Point& x) {
      const double y1 = (x[0] / d - a1) / w1;
      const double y2 = two ? (x[1] / d - a2) / w2 : 0.0;
      double pre = 1.0;
      switch (k) {
        case 1: pre = y1; break;
        case 2: pre = y1 * y1 * y1; break;
        case 3: pre = y2; break;
        case 4: pre = y1 * y2; break;
        default: break;
      }
      return pre * std::exp(-y1 * y1 - y2 * y2);
    }));
  }
  return out;
}

RealField kernel_Omega(double alpha, const GridSpec& grid) {
  require(alpha > 0.0, "alpha must be positive");
  for (int a = 0; a < grid.dim(); ++a) {
    if (grid.max_wavenumber(a) <= 2.0)
      throw ValidationError("grid does not resolve the cutoff support |xi| <= 2");
    if (2.0 * std::numbers::pi / grid.length(a) > 0.1)
      throw ValidationError("box too small to sample the cutoff in frequency");
  }
  SpectralField s(grid);
  const int half = grid.nx() / 2 + 1;
  for (int j = 0; j < grid.ny(); ++j) {
    const double k2 = grid.dim() == 2 ? grid.wavenumber(1, j) : 0.0;
    const int m2 = grid.dim() == 2 ? grid.mode(1, j) : 0;
    for (int i = 0; i < half; ++i) {
      const double k1 = grid.wavenumber(0, i);
      const double k = std::hypot(k1, k2);
      if (k >= 2.0 || i == grid.nx() / 2) continue;
      // (-1)^m moves the origin to the box centre.
      const double sign = ((i + m2) % 2 == 0) ? 1.0 : -1.0;
      s.at(i, j) = std::complex<double>(0.0, sign * k1 * std::pow(k, alpha) *
                                                 cutoff_profile(k, 1.0));
    }
  }
  RealField out = inverse_transform(s);
  out *= 1.0 / grid.cell_volume();
  return out;
}

OmegaReport omega_decay_check(const RealField& Omega, double alpha) {
  const GridSpec& g = Omega.grid();
  OmegaReport r;
  r.exponent = g.dim() + alpha + 1.0;
  const double outer = 0.4 * std::min(g.length(0), g.dim() == 2 ? g.length(1)
                                                                  : g.length(0));
  double norm = 0.0, odd = 0.0;
  for (std::size_t k = 0; k < Omega.size(); ++k) {
    const Point x = g.point(k);
    const double rad = std::hypot(x[0], x[1]);
    const double v = std::abs(Omega[k]) * std::pow(1.0 + rad * rad, 0.5 * r.exponent);
    if (rad >= 5.0 && rad <= 6.0) r.inner_value = std::max(r.inner_value, v);
    if (rad >= 5.0 && rad <= outer) r.window_sup = std::max(r.window_sup, v);
  }
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const int mirror = (g.nx() - i) % g.nx();
      const double sum = Omega.at(i, j) + Omega.at(mirror, j);
      odd += sum * sum;
      norm += Omega.at(i, j) * Omega.at(i, j);
    }
  r.odd_residual = std::sqrt(odd / norm);
  r.integral = integral(Omega);
  if (!(r.inner_value > 0.0))
    throw NumericalError("kernel vanishes on the inner window");
  r.ratio = r.window_sup / r.inner_value;
  return r;
}

double lp_norm(const RealField& f, double p) {
  require(p >= 1.0, "L^p norm needs p >= 1");
  double sum = 0.0;
  for (double v : f.values()) sum += std::pow(std::abs(v), p);
  return std::pow(sum * f.grid().cell_volume(), 1.0 / p);
}

RieszCommutatorReport riesz_commutator_check(const RealField& f,
                                             const RealField& g, double p) {
  require_same_grid(f, g);
  RealField r = fractional_power(f * g, 1.0);
  r -= f * fractional_power(g, 1.0);
  for (int a = 0; a < f.grid().dim(); ++a) {
    const Axis ax = a == 0 ? Axis::x1 : Axis::x2;
    r -= partial_derivative(f, ax) * riesz_transform(g, ax);
  }
  RieszCommutatorReport out;
  out.lhs = lp_norm(r, p);
  out.scale = max_abs(fractional_power(f, 1.0)) * lp_norm(g, p);
  if (max_abs(fractional_power(f, 1.0)) < 1e-12) {
    // Constant f: every term vanishes and the ratio is taken as 0.
    if (out.lhs > 1e-10 * std::max(1.0, lp_norm(g, p)))
      throw NumericalError("commutator ratio undefined: |nabla| f vanishes");
    return out;
  }
  out.ratio = out.lhs / out.scale;
  return out;
}

}  // namespace fdisp
