#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fdisp/field.hpp"
#include "fdisp/ground_state.hpp"
#include "fdisp/linearized.hpp"
#include "fdisp/weights.hpp"

namespace fdisp {

/// Fields derived from (Q, psi0) that the modulation fit and the modulation
/// equations keep reusing.
struct ModulationProfiles {
  RealField Q, psi0;
  RealField d1Q, d2Q, d11Q, d1psi0;
  RealField x_grad_d1Q;   ///< x . grad d1 Q
  RealField x_grad_psi0;  ///< x . grad psi0
  RealField L_d1psi0;
  RealField d1Q_squared;
  double mu0 = 0.0;
  double d1Q_norm2 = 0.0;
  double psi0_Q = 0.0;
  double Q_half_norm = 0.0;
  bool dealiased = false;
};

ModulationProfiles make_profiles(const RealField& Q, const RealField& psi0,
                                 double mu0, bool dealiased = false);

/// lambda u(lambda x + z) on u's grid, reading u periodically.
RealField rescaled_field(const RealField& u, double lambda, const Point& z);

/// lambda^{-1} f((x - z) / lambda), f read as zero outside its box and the
/// translation applied periodically.
RealField profile_at(const RealField& f, double lambda, const Point& z);

struct ModulationState {
  double t = 0.0;
  double lambda = 1.0;
  double z1 = 0.0;
  double z2 = 0.0;
  RealField epsilon;
  /// (eps, d1 Q), (eps, psi0), (eps, d2 Q).
  std::array<double, 3> residuals{};
  int iterations = 0;
};

struct FitOptions {
  int max_iterations = 50;
  double tolerance = 1e-12;
  /// Fit fails once ||eps||_{H^1/2} exceeds this fraction of ||Q||_{H^1/2}.
  double tube_limit = 0.3;
};

/// Newton iteration on (lambda, z1) with z2 = 0 zeroing (eps, d1 Q) and
/// (eps, psi0) for eps = lambda u(lambda x + z) - Q. The Jacobian is exact:
/// d/dlambda = (Lambda v)/lambda and d/dz1 = (d1 v)/lambda with v the
/// rescaled field.
ModulationState modulation_fit(const RealField& u, const ModulationProfiles& p,
                               double lambda0 = 1.0, double z1_0 = 0.0,
                               const FitOptions& opts = {});

struct TubeDistance {
  double distance = 0.0;
  Point shift{0.0, 0.0};  ///< position d of the best translate Q(x - d)
};

/// inf over d of ||u - Q(. - d)||_{H^1/2}: grid search by FFT
/// cross-correlation, then Newton on the correlation.
TubeDistance tube_distance(const RealField& u, const RealField& Q);

struct EpsilonEnergy {
  double eps_mass = 0.0;            ///< 2 (Q, eps) + ||eps||^2
  double energy = 0.0;              ///< E[Q + eps]
  double energy_linearized = 0.0;   ///< expansion around Q
  double linearization_residual = 0.0;  ///< relative to the term magnitudes
};

/// E[Q + eps] = E[Q] + (1/2)(L eps, eps) - (Q, eps) - (1/2)||eps||^2
/// - (1/6) integral eps^3 for alpha = 1, n = 2. The residual measures the
/// gap between the two sides.
EpsilonEnergy epsilon_mass_energy(const RealField& eps, const RealField& Q);

/// J_A = integral eps F chi(x1 / A).
double J_A_functional(const RealField& eps, const RealField& F, double A);
/// K_A = lambda (J_A - kappa).
double K_A_functional(double J_A, double lambda, double kappa);

/// eta = u - Q_{lambda, z1}.
RealField eta_field(const RealField& u, double lambda, double z1,
                    const RealField& Q);

/// m(r) = integral eta^2(r + z1, x2) dx2 on the x1 grid coordinates r.
std::vector<double> eta_marginal(const RealField& eta, double z1);

/// integral over x1 > x0 of the marginal (soliton frame).
double right_mass_from_marginal(const std::vector<double>& marginal,
                                const GridSpec& grid, double x0);

/// integral over x1 > x0 of eta^2(x1 + z1, x2).
double right_mass(const RealField& eta, double x0, double z1);

/// integral over x1 > 0 of <x1>^m eps^2.
double weighted_eps_mass(const RealField& eps, double m);

struct EtaSnapshot {
  double t = 0.0;
  double z1 = 0.0;
  std::vector<double> marginal;  ///< soliton-frame marginal of eta^2
};

struct MonotoneSeries {
  std::vector<double> t;
  std::vector<double> J;    ///< integral eta^2 varphi(x1 - z1(t0) + (t0-t)/2 - x0)
  std::vector<double> rho;  ///< integral eta^2 (varphi(x~) - varphi(x*))
  double max_J_drop = 0.0;   ///< max over t of J(t0) - J(t)
  double max_rho_rise = 0.0; ///< max over t of R(t0) - R(t)
};

/// Both almost-monotone functionals along the snapshots with t <= t0. The
/// weight uses only the x1 part of `w` (sigma = (1, 0)). t0 has to be one of
/// the snapshot times.
MonotoneSeries monotone_J_x0t0(const std::vector<EtaSnapshot>& snapshots,
                               const GridSpec& grid, double x0, double t0,
                               double nu, const WeightParams& w);

struct ModulationRates {
  double a = 0.0;  ///< lambda_s / lambda
  double b = 0.0;  ///< (z1)_s / lambda - 1
  double determinant = 0.0;
};

/// Solves the 2x2 modulation system obtained by differentiating the two
/// orthogonality conditions along the flow.
ModulationRates modulation_rates(const RealField& eps,
                                 const ModulationProfiles& p);

struct OdeResidualReport {
  double max_discrepancy = 0.0;  ///< inside [s_lo, s_hi]
  double max_bound_ratio = 0.0;  ///< (|a| + |b|) / (||eps|| + ||eps||^2)
  int samples = 0;
};

/// Compares finite-difference rates of (lambda, z1) in s with the modulation
/// system's prediction. Discrepancy at a sample is
/// (|a_fd - a| + |b_fd - b|) / (|a| + |b|).
OdeResidualReport modulation_ode_residual(const std::vector<double>& s,
                                          const std::vector<double>& lambda,
                                          const std::vector<double>& z1,
                                          const std::vector<double>& a,
                                          const std::vector<double>& b,
                                          const std::vector<double>& eps_l2,
                                          double s_lo, double s_hi);

/// Centred (three-point, non-uniform) derivative of y with respect to x;
/// one-sided at the ends.
std::vector<double> finite_difference(const std::vector<double>& x,
                                      const std::vector<double>& y);

struct InstabilityConfig {
  int n_index = 40;
  bool flip_sign = false;
  double s_end = 20.0;
  double dt = 0.002;
  double fit_interval = 0.05;  ///< time between modulation fits
  double A = 16.0;
  std::vector<double> x0_list{8.0, 16.0, 24.0};
  double m_exponent = 1.25;
  double weight_scale = 1.0;  ///< M of the eta functionals
  double weight_gamma = 1.5;
  double nu = 0.25;
  double F_edge_tolerance = 3e-3;
  double tube_limit = 0.3;
  bool keep_snapshots = true;

  void validate(const GridSpec& grid) const;
};

struct VirialRecord {
  double t = 0.0;
  double s = 0.0;
  double lambda = 1.0;
  double z1 = 0.0;
  double J_A = 0.0;
  double K_A = 0.0;
  double dK_ds = 0.0;
  double tube_distance = 0.0;
  double eps_l2 = 0.0;
  double eps_half = 0.0;
  double eps_mass = 0.0;
  double eps_Q = 0.0;  ///< (eps, Q)
  double energy = 0.0;
  double energy_scaled = 0.0;  ///< lambda E[u0]
  double energy_linearization_residual = 0.0;
  double a_ode = 0.0;
  double b_ode = 0.0;
  double weighted_mass = 0.0;
  std::vector<double> right_mass;
};

struct InstabilityResult {
  std::vector<VirialRecord> records;
  std::vector<EtaSnapshot> snapshots;
  std::string verdict;  ///< PASS, FAIL or BLOWUP
  std::string reason;
  double lower_bound = 0.0;  ///< (1/8n)(||Q||^2 - (Q, psi0)^2 / ||psi0||^2)
  double cauchy_schwarz_gap = 0.0;  ///< ||Q||^2 - (Q, psi0)^2 / ||psi0||^2
  double kappa = 0.0;
  double avg_dK_ds = 0.0;   ///< over [2, s_last]
  double early_dK_ds = 0.0; ///< over [0, min(2, s_last)]
  double max_tube_ratio = 0.0;
  bool K_increasing = false;
  double mass_drift = 0.0;    ///< max |M[eps] - M[eps](0)| / ||u0||^2
  /// max |E[Q+eps] - lambda E[u0]| over the dispersive part
  /// (1/2) integral ||nabla|^{1/2} u0|^2; E itself is a near-cancelling
  /// difference and is no useful scale.
  double energy_drift = 0.0;
  double max_linearization_residual = 0.0;
  double energy_u0 = 0.0;
  double dispersive_u0 = 0.0;
  bool blew_up = false;
  bool left_tube = false;
  double s_last = 0.0;
};

/// Evolves u0 = Q + eps0 and tracks the modulation, virial and localized
/// mass diagnostics every `fit_interval`. `gs` and `spectrum` must come
/// from the same Q; the evolution dealiases iff the ground state does.
InstabilityResult instability_experiment(const GroundStateBundle& gs,
                                         const SpectrumBundle& spectrum,
                                         const InstabilityConfig& cfg);

}  // namespace fdisp
