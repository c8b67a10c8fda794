#pragma once

#include <cstdint>
#include <optional>

#include "fdisp/field.hpp"

namespace fdisp {

/// L f = |nabla| f + f - Q f. The dealiased form is
/// |nabla| f + f - P(Q P f) with P the 2/3-rule projection; it is the
/// linearization of the dealiased flow and stays self-adjoint.
RealField apply_L(const RealField& f, const RealField& Q,
                  bool dealiased = false);

struct EigenOptions {
  int max_outer = 400;
  double tolerance = 1e-9;  ///< on ||L psi + mu psi|| / ||psi||
  int max_cg = 400;
  double cg_tolerance = 1e-12;
  bool dealiased = false;
};

struct SpectrumBundle {
  double mu0 = 0.0;
  RealField psi0;
  double eigen_residual = 0.0;
  int outer_iterations = 0;
  double kernel_residual_x1 = 0.0;  ///< ||L d1 Q|| / ||d1 Q||
  double kernel_residual_x2 = 0.0;
  double coercivity_constant_estimate = 0.0;  ///< filled by a coercivity probe
};

/// Solves (L - shift) y = b with preconditioned conjugate gradients; the
/// shift must lie below the spectrum of L.
RealField solve_shifted_L(const RealField& b, const RealField& Q, double shift,
                          int max_iterations, double tolerance,
                          int* iterations = nullptr, bool dealiased = false);

/// Lowest eigenpair (-mu0, psi0) of L by shift-invert iteration. psi0 has
/// unit L2 norm and is positive at the box centre.
SpectrumBundle lowest_eigenpair(const RealField& Q,
                                const EigenOptions& opts = {});

/// Rayleigh quotient of the lowest even-sector eigenvector of L orthogonal
/// to psi0, after `iterations` deflated shift-invert steps.
double second_radial_eigenvalue(const RealField& Q, const RealField& psi0,
                                int iterations = 60, bool dealiased = false);

/// Max over 90-degree rotations and the diagonal reflection of
/// ||f - rotated f|| / ||f||.
double rotation_asymmetry(const RealField& f);

/// (L f, f) / ||f||^2_{H^{1/2}}.
double coercivity_ratio(const RealField& f, const RealField& Q,
                        bool dealiased = false);

/// Smooth random field: a sum of a few Gaussians with random centres in the
/// inner half box, widths in [1, 4] and amplitudes in [-1, 1].
RealField random_smooth_field(const GridSpec& grid, std::uint64_t seed,
                              int bumps = 4);

/// Removes the components along d1 Q, d2 Q and psi0 (Gram-Schmidt).
RealField project_out(const RealField& f, const RealField& Q,
                      const RealField& psi0);

/// Minimum coercivity ratio over `trials` projected random fields.
double coercivity_probe(const RealField& Q, const RealField& psi0, int trials,
                        std::uint64_t seed, bool dealiased = false);

/// ||f||_{L3}^3 / (||nabla|^{1/2} f||^2 ||f||_2).
double gagliardo_nirenberg_ratio(const RealField& f);

struct InstabilityData {
  int n_index = 0;
  double a_coeff = 0.0;
  RealField epsilon0;
  RealField u0;
  double orthogonality_residual = 0.0;
};

/// n0 = (1 + ||psi0||_{H^{1/2}} / ||psi0||_2) ||Q||_{H^{1/2}} / delta.
double minimal_index(const RealField& Q, const RealField& psi0, double delta);

/// epsilon0 = (Q + a psi0) / n with a = -(psi0, Q) / ||psi0||^2, then
/// orthogonalized against d1 Q, d2 Q and psi0. The sign flip runs the
/// opposite perturbation -epsilon0.
InstabilityData build_instability_data(const RealField& Q,
                                       const RealField& psi0, int n_index,
                                       bool flip_sign = false,
                                       std::optional<double> tube_radius = {});

/// (1/8n)(||Q||^2 - (Q, psi0)^2 / ||psi0||^2).
double lower_bound_constant(const RealField& Q, const RealField& psi0,
                            int n_index);

}  // namespace fdisp
