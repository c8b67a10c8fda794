#pragma once

#include <optional>

#include "fdisp/field.hpp"

namespace fdisp {

struct GroundStateOptions {
  int max_iterations = 5000;
  /// Stop once the relative residual drops below this value...
  double residual_tolerance = 1e-10;
  /// ...and the stabilizing factor is this close to 1.
  double stabilizer_tolerance = 1e-10;
  /// Truncate the nonlinearity with the 2/3 rule. The result is then an exact
  /// travelling wave of the dealiased evolution on the same grid.
  bool dealias = false;
};

/// Solution of c Q + |nabla|^alpha Q = Q^2 / 2 together with its diagnostics.
struct GroundStateBundle {
  double alpha = 1.0;
  double c = 1.0;
  RealField Q;
  double residual_norm = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double decay_exponent = 0.0;
  int iterations = 0;
  double stabilizer = 1.0;
  bool dealiased = false;

  const GridSpec& grid() const noexcept { return Q.grid(); }
};

/// 2 exp(-|x|^2 / 4).
RealField default_initial_guess(const GridSpec& grid);

/// ||c Q + |nabla|^alpha Q - Q^2/2|| / ||Q||, with the product truncated by
/// the 2/3 rule when `dealiased`.
double ground_state_residual(const RealField& Q, double alpha, double c,
                             bool dealiased = false);

/// Petviashvili iteration with stabilizing exponent 2.
GroundStateBundle petviashvili_solve(double alpha, double c,
                                     const GridSpec& grid,
                                     std::optional<RealField> init = {},
                                     const GroundStateOptions& opts = {});

/// Q_c(x) = c Q(c^{1/alpha} x), resampled on the bundle's grid.
GroundStateBundle scale_ground_state(const GroundStateBundle& b, double c_new);

/// Power-law decay exponent of |f| along the positive x1 ray through the box
/// centre, fitted over radii [lo * L, hi * L] with periodic images accounted
/// for. Samples below 1e-14 are dropped.
double decay_exponent_fit(const RealField& f, double lo = 0.2, double hi = 0.4);

struct MassEnergy {
  double mass = 0.0;
  double energy = 0.0;
};

/// mass = integral u^2, energy = (1/2) integral ||nabla|^{alpha/2} u|^2
/// - (1/6) integral u^3.
MassEnergy mass_energy(const RealField& u, double alpha);

struct PohozaevTerms {
  double dispersive = 0.0;  ///< integral ||nabla|^{alpha/2} Q|^2
  double cubic = 0.0;       ///< integral Q^3
  double slack = 0.0;       ///< |D - n T / (6 alpha)| / |n T / (6 alpha)|
};

/// Pohozaev balance for c Q + |nabla|^alpha Q = Q^2/2 in n dimensions,
/// independent of c: integral ||nabla|^{alpha/2}Q|^2 = n/(6 alpha) integral Q^3.
PohozaevTerms pohozaev_check(const RealField& Q, double alpha);

}  // namespace fdisp
