#include "fdisp/commands.hpp"

#include <cmath>
#include <cstdio>

#include "fdisp/error.hpp"
#include "fdisp/evolution.hpp"
#include "fdisp/fourier.hpp"
#include "fdisp/ground_state.hpp"
#include "fdisp/linearized.hpp"
#include "fdisp/monotonicity.hpp"

namespace fdisp {
namespace {

std::string csv_line(const std::vector<double>& row) {
  std::string s;
  for (std::size_t i = 0; i < row.size(); ++i)
    s += (i ? "," : "") + format_real(row[i]);
  return s;
}

std::string join(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  return s;
}

void emit(CommandOutput& out, const CsvTable& t,
          const std::filesystem::path& path) {
  emit_csv(t, path);
  out.files.push_back(path);
}

GroundStateBundle ground_state_for(const ExperimentConfig& cfg,
                                   const GridSpec& grid, bool dealias) {
  if (cfg.has("initial_path") && cfg.text("initial", "") == "checkpoint") {
    Checkpoint cp = load_checkpoint(cfg.text("initial_path", ""), grid);
    GroundStateBundle b{.Q = cp.field};
    b.alpha = cp.alpha;
    b.c = cfg.real("c", 1.0);
    b.dealiased = dealias;
    b.residual_norm = ground_state_residual(b.Q, b.alpha, b.c, dealias);
    const MassEnergy me = mass_energy(b.Q, b.alpha);
    b.mass = me.mass;
    b.energy = me.energy;
    return b;
  }
  GroundStateOptions o;
  o.max_iterations = static_cast<int>(cfg.integer("max_iterations", 5000));
  o.residual_tolerance = cfg.real("tolerance", 1e-10);
  o.dealias = dealias;
  return petviashvili_solve(cfg.real("alpha", 1.0), cfg.real("c", 1.0), grid,
                            {}, o);
}

CommandOutput ground_state_command(const ExperimentConfig& cfg,
                                   const std::filesystem::path& dir) {
  const GridSpec grid = grid_from(cfg, 256, 64.0);
  const GroundStateBundle b =
      ground_state_for(cfg, grid, cfg.flag("dealias", false));
  CommandOutput out;
  save_checkpoint(b.Q, b.alpha, 0.0, dir / "ground_state.bin");
  out.files.push_back(dir / "ground_state.bin");
  CsvTable t{{"alpha", "c", "residual", "mass", "energy", "decay_exponent",
              "iterations", "pohozaev_slack"},
             {}};
  const double slack = pohozaev_check(b.Q, b.alpha).slack;
  t.rows.push_back({b.alpha, b.c, b.residual_norm, b.mass, b.energy,
                    b.decay_exponent, static_cast<double>(b.iterations),
                    slack});
  emit(out, t, dir / "ground_state.csv");
  out.lines = {join(t.columns), csv_line(t.rows[0])};
  return out;
}

CommandOutput spectrum_command(const ExperimentConfig& cfg,
                               const std::filesystem::path& dir) {
  const GridSpec grid = grid_from(cfg, 256, 64.0);
  require(grid.dim() == 2, "spectrum: a two-dimensional grid is required");
  require(cfg.real("alpha", 1.0) == 1.0, "spectrum: alpha must be 1");
  const bool dealias = cfg.flag("dealias", false);
  const GroundStateBundle b = ground_state_for(cfg, grid, dealias);
  EigenOptions eo;
  eo.dealiased = dealias;
  SpectrumBundle sp = lowest_eigenpair(b.Q, eo);
  const int trials = static_cast<int>(cfg.integer("coercivity_trials", 200));
  require(trials >= 1, "spectrum: coercivity_trials must be positive");
  // The smallest (L f, f) / ||f||^2_{H^1/2} seen over the projected trials.
  sp.coercivity_constant_estimate =
      coercivity_probe(b.Q, sp.psi0, trials,
                       static_cast<std::uint64_t>(cfg.integer("seed", 7)),
                       dealias);
  CommandOutput out;
  save_checkpoint(sp.psi0, b.alpha, 0.0, dir / "psi0.bin");
  out.files.push_back(dir / "psi0.bin");
  CsvTable t{{"mu0", "eigen_residual", "kernel_residual_x1",
              "kernel_residual_x2", "coercivity_estimate"},
             {{sp.mu0, sp.eigen_residual, sp.kernel_residual_x1,
               sp.kernel_residual_x2, sp.coercivity_constant_estimate}}};
  emit(out, t, dir / "spectrum.csv");
  out.lines = {join(t.columns), csv_line(t.rows[0])};
  return out;
}

CommandOutput simulate_command(const ExperimentConfig& cfg,
                               const std::filesystem::path& dir) {
  SimConfig sc;
  sc.alpha = cfg.real("alpha", 1.0);
  sc.grid = grid_from(cfg, 256, 32.0);
  sc.dt = cfg.real("dt", 0.01);
  sc.t_end = cfg.real("t_end", 1.0);
  sc.dealias = cfg.flag("dealias", true);
  sc.diagnostics_every = static_cast<int>(cfg.integer("diagnostics_every", 10));
  sc.nonlinearity = cfg.flag("nonlinearity", true);
  const std::string scheme = cfg.text("scheme", "etdrk4");
  if (scheme == "etdrk4")
    sc.scheme = Scheme::etdrk4;
  else if (scheme == "ifrk4")
    sc.scheme = Scheme::ifrk4;
  else
    throw ValidationError("scheme must be etdrk4 or ifrk4");
  const long every = cfg.integer("checkpoint_every", 0);
  require(every >= 0, "checkpoint_every must be non-negative");
  sc.validate();

  const std::string initial = cfg.text("initial", "soliton");
  std::optional<RealField> u0;
  if (initial == "soliton") {
    u0 = ground_state_for(cfg, sc.grid, sc.dealias).Q;
  } else if (initial == "gaussian") {
    const double a = cfg.real("amplitude", 1.0);
    const double w = cfg.real("width", 1.0);
    require(w > 0.0, "width must be positive");
    u0 = RealField::from_function(sc.grid, [&](const Point& x) {
      return a * std::exp(-(x[0] * x[0] + x[1] * x[1]) / (w * w));
    });
  } else if (initial == "checkpoint") {
    require(cfg.has("initial_path"), "initial = checkpoint needs initial_path");
    u0 = load_checkpoint(cfg.text("initial_path", ""), sc.grid).field;
  } else {
    throw ValidationError("initial must be soliton, gaussian or checkpoint");
  }

  CommandOutput out;
  auto on_sample = [&](const SimState& s) {
    if (every > 0 && s.step_index % every == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "state_%08ld.bin", s.step_index);
      save_checkpoint(s.u, sc.alpha, s.t, dir / name);
      out.files.push_back(dir / name);
    }
  };
  const DiagnosticSeries series = run(sc, *u0, {}, on_sample);
  emit(out, CsvTable{series.columns, series.rows}, dir / "diagnostics.csv");
  if (series.last_state) {
    save_checkpoint(series.last_state->u, sc.alpha, series.last_state->t,
                    dir / "final.bin");
    out.files.push_back(dir / "final.bin");
  }
  if (series.blew_up)
    throw NumericalError("simulate: blow-up detected at t = " +
                         format_real(series.last_state ? series.last_state->t
                                                       : 0.0));
  const auto& first = series.rows.front();
  const auto& last = series.rows.back();
  out.lines = {"t,mass_drift,energy_drift",
               csv_line({last[0], std::abs(last[1] - first[1]) / first[1],
                         std::abs(last[2] - first[2]) /
                             std::max(std::abs(first[2]), 1e-300)})};
  return out;
}

CommandOutput monotonicity_command(const ExperimentConfig& cfg,
                                   const std::filesystem::path& dir) {
  const GridSpec grid = grid_from(cfg, 256, 128.0);
  const double alpha = cfg.real("alpha", 1.0);
  WeightParams w;
  w.sigma = {cfg.real("sigma1", 1.0), cfg.real("sigma2", 0.0)};
  w.omega = cfg.real("weight_shift", 0.0);
  w.gamma = cfg.real("gamma", 1.0);
  w.m_scale = cfg.real("m_scale", 1.0);
  ProbeFamily fam;
  fam.count = static_cast<int>(cfg.integer("probe_count", 50));
  fam.seed = static_cast<std::uint64_t>(cfg.integer("seed", 7));
  fam.min_width = cfg.real("probe_min_width", fam.min_width);
  fam.max_width = cfg.real("probe_max_width", fam.max_width);
  fam.centre_fraction = cfg.real("probe_centre_fraction", fam.centre_fraction);
  fam.dilation = cfg.real("probe_dilation", fam.dilation);
  require(fam.count >= 1, "probe_count must be positive");
  std::optional<double> c1;
  if (cfg.has("c1")) c1 = cfg.real("c1", 0.0);
  const bool admissible = !cfg.flag("allow_gamma_outside", false);
  const std::vector<RealField> probes = probe_family(grid, fam);
  const Lemma1Sweep sw =
      cfg.flag("corollary", false)
          ? corollary_sweep(probes, w, alpha, c1, admissible)
          : lemma1_sweep(probes, w, alpha, c1, false, admissible);
  CsvTable t{{"probe_id", "lhs", "T1", "T2", "c1", "c2", "slack", "seam"}, {}};
  for (std::size_t i = 0; i < sw.reports.size(); ++i) {
    const Lemma1Report& r = sw.reports[i];
    t.rows.push_back({static_cast<double>(i), r.lhs, r.smoothing_term,
                      r.mass_term, r.c1_used, sw.c2, r.slack, r.seam});
  }
  CommandOutput out;
  emit(out, t, dir / "monotonicity.csv");
  out.lines = {"c1,c2,min_slack,max_seam",
               csv_line({sw.c1, sw.c2, sw.min_slack, sw.max_seam})};
  return out;
}

CommandOutput kernel_command(const ExperimentConfig& cfg,
                             const std::filesystem::path& dir) {
  const GridSpec grid = grid_from(cfg, 512, 512.0);
  const double alpha = cfg.real("alpha", 1.0);
  const OmegaReport r = omega_decay_check(kernel_Omega(alpha, grid), alpha);
  CsvTable t{{"dim", "alpha", "inner_value", "window_sup", "ratio",
              "odd_residual", "integral", "exponent"},
             {{static_cast<double>(grid.dim()), alpha, r.inner_value,
               r.window_sup, r.ratio, r.odd_residual, r.integral,
               r.exponent}}};
  CommandOutput out;
  emit(out, t, dir / "kernel.csv");
  out.lines = {join(t.columns), csv_line(t.rows[0])};
  return out;
}

CommandOutput instability_command(const ExperimentConfig& cfg,
                                  const std::filesystem::path& dir) {
  const GridSpec grid = grid_from(cfg, 512, 64.0);
  require(cfg.real("alpha", 1.0) == 1.0, "instability: alpha must be 1");
  const InstabilityConfig ic = instability_config_from(cfg);
  ic.validate(grid);
  const bool dealias = cfg.flag("dealias", true);
  const GroundStateBundle b = ground_state_for(cfg, grid, dealias);
  EigenOptions eo;
  eo.dealiased = dealias;
  const SpectrumBundle sp = lowest_eigenpair(b.Q, eo);
  InstabilityResult r = instability_experiment(b, sp, ic);
  CommandOutput out;
  emit(out, virial_table(r), dir / "virial.csv");
  emit(out, right_mass_table(r, ic.x0_list), dir / "rightmass.csv");
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "verdict=%s avg_dK_ds=%.6g early_dK_ds=%.6g lower_bound=%.6g "
                "max_tube_ratio=%.6g K_increasing=%d s_end=%.6g",
                r.verdict.c_str(), r.avg_dK_ds, r.early_dK_ds, r.lower_bound,
                r.max_tube_ratio, r.K_increasing ? 1 : 0, r.s_last);
  out.lines = {buf, "reason=" + r.reason};
  out.instability = std::move(r);
  return out;
}

}  // namespace

GridSpec grid_from(const ExperimentConfig& cfg, int default_n,
                   double default_L) {
  const int dim = static_cast<int>(cfg.integer("dim", 2));
  const int nx = static_cast<int>(cfg.integer("nx", default_n));
  const int ny = static_cast<int>(cfg.integer("ny", nx));
  const double Lx = cfg.real("Lx", default_L);
  const double Ly = cfg.real("Ly", Lx);
  return GridSpec(dim, {nx, ny}, {Lx, Ly});
}

InstabilityConfig instability_config_from(const ExperimentConfig& cfg) {
  InstabilityConfig ic;
  ic.n_index = static_cast<int>(cfg.integer("n_index", ic.n_index));
  ic.flip_sign = cfg.flag("flip_sign", ic.flip_sign);
  ic.s_end = cfg.real("t_end", ic.s_end);
  ic.dt = cfg.real("dt", ic.dt);
  ic.fit_interval = cfg.real("fit_interval", ic.fit_interval);
  ic.A = cfg.real("A", ic.A);
  ic.x0_list = cfg.list("x0_list", ic.x0_list);
  ic.m_exponent = cfg.real("m_exponent", ic.m_exponent);
  ic.weight_scale = cfg.real("eta_scale", ic.weight_scale);
  ic.weight_gamma = cfg.real("eta_gamma", ic.weight_gamma);
  ic.nu = cfg.real("nu", ic.nu);
  ic.F_edge_tolerance = cfg.real("F_edge_tolerance", ic.F_edge_tolerance);
  ic.tube_limit = cfg.real("tube_limit", ic.tube_limit);
  return ic;
}

CsvTable virial_table(const InstabilityResult& r) {
  CsvTable t{{"s", "lambda", "z1", "J_A", "K_A", "dK_ds", "tube_distance", "t",
              "eps_mass", "energy", "energy_scaled", "weighted_mass", "a",
              "b"},
             {}};
  for (const VirialRecord& v : r.records)
    t.rows.push_back({v.s, v.lambda, v.z1, v.J_A, v.K_A, v.dK_ds,
                      v.tube_distance, v.t, v.eps_mass, v.energy,
                      v.energy_scaled, v.weighted_mass, v.a_ode, v.b_ode});
  return t;
}

CsvTable right_mass_table(const InstabilityResult& r,
                          const std::vector<double>& x0_list) {
  CsvTable t{{"s", "x0", "value"}, {}};
  for (const VirialRecord& v : r.records)
    for (std::size_t k = 0; k < x0_list.size() && k < v.right_mass.size(); ++k)
      t.rows.push_back({v.s, x0_list[k], v.right_mass[k]});
  return t;
}

CommandOutput run_command(const ExperimentConfig& cfg,
                          const std::filesystem::path& dir) {
  validate_config(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::string& c = cfg.command;
  if (c == "ground-state") return ground_state_command(cfg, dir);
  if (c == "spectrum") return spectrum_command(cfg, dir);
  if (c == "simulate") return simulate_command(cfg, dir);
  if (c == "check-monotonicity") return monotonicity_command(cfg, dir);
  if (c == "kernel-decay") return kernel_command(cfg, dir);
  if (c == "instability") return instability_command(cfg, dir);
  throw ValidationError("unknown command '" + c + "'");
}

}  // namespace fdisp
