#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fdisp/field.hpp"

namespace fdisp {

/// Exponential integrators for the stiff linear part. Both propagate the
/// dispersion exactly; they differ in how the nonlinear term is integrated.
enum class Scheme {
  etdrk4,  ///< Cox-Matthews exponential time differencing
  ifrk4,   ///< integrating factor (Lawson) RK4
};

/// u_t = d1 |nabla|^alpha u - (1/2) d1 (u^2) on the periodic box.
struct SimConfig {
  double alpha = 1.0;
  GridSpec grid = GridSpec::square(256, 32.0);
  double dt = 0.01;
  double t_end = 1.0;
  bool dealias = true;
  int diagnostics_every = 10;
  bool nonlinearity = true;
  Scheme scheme = Scheme::etdrk4;

  /// Throws ValidationError on bad parameters, including
  /// dt * max |k1| |k|^alpha > 10.
  void validate() const;
  int steps() const;
};

struct SimState {
  double t = 0.0;
  RealField u;
  long step_index = 0;
};

/// Fourth-order exponential integrator; the linear part is propagated
/// exactly, the nonlinear term by four RK-type stages.
class Integrator {
 public:
  explicit Integrator(const SimConfig& config);

  /// One step of size dt (negative dt integrates backwards). Returns nothing
  /// if the new state is non-finite or exceeds 1e6 in magnitude.
  std::optional<SimState> step(const SimState& s) const;
  std::optional<SimState> step(const SimState& s, double dt) const;

  const SimConfig& config() const noexcept { return config_; }

  /// Initial state; u0 is dealiased when the configuration asks for it.
  SimState initial_state(const RealField& u0) const;

 private:
  using Spectrum = std::vector<std::complex<double>>;
  struct Coefficients {
    double dt = 0.0;
    Spectrum e, e2, q, f1, f2, f3;
  };
  Coefficients coefficients(double dt) const;
  void nonlinear(const Spectrum& uh, Spectrum& out, double scale) const;
  std::optional<SimState> finish(const SimState& s, double dt,
                                 const Spectrum& uh) const;

  SimConfig config_;
  Coefficients cached_;
  std::vector<double> dispersion_;  // k1 |k|^alpha, zero on the Nyquist line
  std::vector<double> k1_;          // zero on the Nyquist line
  std::vector<char> keep_;          // 2/3-rule mask
};

/// A named set of diagnostic columns computed from a snapshot.
struct Observer {
  std::vector<std::string> columns;
  std::function<std::vector<double>(double t, const RealField& u)> evaluate;
};

struct DiagnosticSeries {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool blew_up = false;
  std::optional<SimState> last_state;  ///< last finite state reached
};

/// Default columns t, mass, energy, mean followed by each observer's columns.
DiagnosticSeries run(const SimConfig& config, const RealField& u0,
                     const std::vector<Observer>& observers = {},
                     const std::function<void(const SimState&)>& on_sample = {});

/// Integral of u^2 over { sigma . x - c t >= beta }.
double region_mass(const RealField& u, const std::array<double, 2>& sigma,
                   double beta, double c, double t);

}  // namespace fdisp
