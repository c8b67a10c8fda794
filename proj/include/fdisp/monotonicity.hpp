#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fdisp/field.hpp"
#include "fdisp/weights.hpp"

namespace fdisp {

/// integral u * weight * d1 |nabla|^alpha u.
double weighted_dispersion_form(const RealField& u, const RealField& weight,
                                double alpha);

/// integral u * varphi * d1 |nabla|^alpha u with varphi built from `w`.
double commutator_form(const RealField& u, const WeightParams& w, double alpha);

/// max |u| on the box boundary relative to max |u|; the tail weight varphi
/// jumps across the seam, so this has to be small for the quadrature to
/// mean anything.
double seam_level(const RealField& u);

/// sigma_1 > sqrt(alpha / (2 (1 + alpha))) |sigma'|.
bool sigma_condition(double alpha, const std::array<double, 2>& sigma,
                     int dim);

/// (1,1) = (1+alpha) sigma_1, (1,j) = alpha sigma_j / 2, (j,j) = sigma_1.
Eigen::MatrixXd matrix_M_build(double alpha, const std::vector<double>& sigma);
bool matrix_M_is_pd(const Eigen::MatrixXd& M);
double matrix_M_min_eigenvalue(const Eigen::MatrixXd& M);

/// lambda_min(M) / 2. Equals (alpha+1) sigma_1 / 2 in 1D and sigma_1 / 2 for
/// sigma = (sigma_1, 0); other directions are a heuristic from the quadratic
/// form bound <u, u>_M >= lambda_min |u|^2.
double default_c1(double alpha, const std::array<double, 2>& sigma, int dim);

struct Lemma1Terms {
  double lhs = 0.0;             ///< integral u varphi d1 |nabla|^alpha u
  double smoothing_term = 0.0;  ///< integral ||nabla|^{alpha/2}(u phi)|^2
  double mass_term = 0.0;       ///< integral u^2 phi^2
  double seam = 0.0;
};

/// Terms of the inequality. With `corollary` set, phi is replaced by
/// sqrt(d1 varphi_M) = sqrt(sigma_1 / M) phi_M, so that the mass term is
/// integral u^2 d1 varphi_M.
Lemma1Terms lemma1_terms(const RealField& u, const WeightParams& w,
                         double alpha, bool corollary = false);

struct Lemma1Report {
  double lhs = 0.0;
  double smoothing_term = 0.0;
  double mass_term = 0.0;
  double c1_used = 0.0;
  double c2_fitted = 0.0;
  double slack = 0.0;  ///< -lhs - c1 T1 + c2 T2
  double seam = 0.0;
};

/// Smallest c2 >= 0 that makes this probe satisfy the inequality.
double required_c2(const Lemma1Terms& t, double c1);

/// Report for one probe with a given c2.
Lemma1Report lemma1_check(const RealField& u, const WeightParams& w,
                          double alpha, double c2,
                          std::optional<double> c1_override = {});

struct Lemma1Sweep {
  double c1 = 0.0;
  double c2 = 0.0;  ///< max over the family of the per-probe requirement
  double min_slack = 0.0;
  double max_seam = 0.0;
  std::vector<Lemma1Report> reports;
};

/// Fits one c2 over a probe family and reports every probe's slack with it.
/// Throws ValidationError if sigma violates the sufficient condition, or if
/// gamma is outside (1/2, (alpha+1)/2] while `admissible_gamma_only` is set.
/// Clearing that flag lets the sweep probe weights beyond the proven range.
Lemma1Sweep lemma1_sweep(const std::vector<RealField>& probes,
                         const WeightParams& w, double alpha,
                         std::optional<double> c1_override = {},
                         bool corollary = false,
                         bool admissible_gamma_only = true);

/// Corollary form for the rescaled weights; the default c1 is divided by
/// sigma_1.
Lemma1Sweep corollary_sweep(const std::vector<RealField>& probes,
                            const WeightParams& w, double alpha,
                            std::optional<double> c1_override = {},
                            bool admissible_gamma_only = true);

struct ProbeFamily {
  int count = 50;
  std::uint64_t seed = 7;
  double min_width = 1.0;
  double max_width = 8.0;
  /// Centres are drawn from [-f L, f L] on each axis.
  double centre_fraction = 0.25;
  /// Every probe is sampled as u(x / dilation).
  double dilation = 1.0;
};

/// Gaussian probes with per-axis widths and a prefactor drawn from
/// {1, y1, y1^3, y2, y1 y2} in the scaled coordinates y = (x - centre) / width.
/// The default family puts centres in the inner half box.
std::vector<RealField> probe_family(const GridSpec& grid,
                                    const ProbeFamily& family = {});

/// Omega = inverse Fourier transform of |xi|^alpha (i xi_1) chi(xi), with chi
/// the smooth indicator of the unit ball, sampled on the grid (box centred).
RealField kernel_Omega(double alpha, const GridSpec& grid);

struct OmegaReport {
  double inner_value = 0.0;  ///< max |Omega| <x>^p over radii [5, 6]
  double window_sup = 0.0;   ///< max |Omega| <x>^p over [5, 0.4 L]
  double ratio = 0.0;
  double odd_residual = 0.0;  ///< ||Omega + Omega(-x1, x2)|| / ||Omega||
  double integral = 0.0;
  double exponent = 0.0;  ///< n + alpha + 1
};

OmegaReport omega_decay_check(const RealField& Omega, double alpha);

struct RieszCommutatorReport {
  double lhs = 0.0;
  double scale = 0.0;  ///< || |nabla| f ||_inf ||g||_p
  double ratio = 0.0;
};

/// || |nabla|(fg) - f |nabla| g - sum_j d_j f R_j g ||_p over
/// || |nabla| f ||_inf ||g||_p.
RieszCommutatorReport riesz_commutator_check(const RealField& f,
                                             const RealField& g, double p = 2.0);

double lp_norm(const RealField& f, double p);

}  // namespace fdisp
