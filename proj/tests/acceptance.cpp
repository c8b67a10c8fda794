// Acceptance run: one PASS/FAIL line per criterion, with "info:" lines for
// the numbers behind each verdict. Exit status is nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fdisp/commands.hpp"
#include "fdisp/error.hpp"
#include "fdisp/evolution.hpp"
#include "fdisp/fit.hpp"
#include "fdisp/fourier.hpp"
#include "fdisp/ground_state.hpp"
#include "fdisp/io.hpp"
#include "fdisp/linearized.hpp"
#include "fdisp/modulation.hpp"
#include "fdisp/monotonicity.hpp"
#include "fdisp/resample.hpp"
#include "fdisp/weights.hpp"

using namespace fdisp;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int id, bool ok, const std::string& what) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class... Args>
void info(const char* fmt, Args... args) {
  std::printf("  info: ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_error_on(const RealField& q, double radius,
                    const std::function<double(double)>& exact) {
  const GridSpec& g = q.grid();
  double err = 0.0;
  for (int i = 0; i < g.nx(); ++i) {
    const double x = g.coordinate(0, i);
    if (std::abs(x) <= radius) err = std::max(err, std::abs(q.at(i) - exact(x)));
  }
  return err;
}

// Exact travelling wave of c Q + |D| Q = Q^2/2 on a line of period L.
double periodic_bo(double x, double L, double c) {
  const double k = 2 * pi / L;
  const double a = std::atanh(k / c);
  return 2 * k * std::sinh(a) / (std::cosh(a) - std::cos(k * x));
}

void criterion1() {
  auto bo = [](double x) { return 4.0 / (1.0 + x * x); };
  const auto t0 = Clock::now();
  const GroundStateBundle b = petviashvili_solve(1.0, 1.0, GridSpec::line(4096, 1024.0));
  const double t = seconds_since(t0);
  const double err = max_error_on(b.Q, 20.0, bo);
  verdict(1, b.iterations < 500 && err < 1e-4 && t < 10.0,
          fmt("BO ground state N=4096 L=1024: %d iterations, max error %.3e on "
              "|x|<=20, %.2f s",
              b.iterations, err, t));
  const GroundStateBundle s = petviashvili_solve(1.0, 1.0, GridSpec::line(4096, 512.0));
  info("L=512: error vs 4/(1+x^2) %.3e, vs the periodic travelling wave %.3e",
       max_error_on(s.Q, 20.0, bo),
       max_error_on(s.Q, 20.0, [](double x) { return periodic_bo(x, 512.0, 1.0); }));
}

void criterion2() {
  const auto t0 = Clock::now();
  const GroundStateBundle b = petviashvili_solve(2.0, 1.0, GridSpec::line(512, 64.0));
  const double t = seconds_since(t0);
  const double err = max_error_on(b.Q, 32.0, [](double x) {
    const double s = 1.0 / std::cosh(0.5 * x);
    return 3.0 * s * s;
  });
  verdict(2, err < 1e-6 && t < 10.0,
          fmt("KdV ground state N=512 L=64: max error %.3e, %.2f s", err, t));
}

void criterion3() {
  const auto t0 = Clock::now();
  const GroundStateBundle b = petviashvili_solve(1.0, 1.0, GridSpec::square(512, 64.0));
  const double t = seconds_since(t0);
  const PohozaevTerms p = pohozaev_check(b.Q, 1.0);
  verdict(3,
          b.residual_norm < 1e-8 && std::abs(b.decay_exponent - 3.0) <= 0.3 &&
              p.slack < 1e-3 && t < 120.0,
          fmt("2D ground state 512^2 L=64: residual %.2e, decay exponent %.3f, "
              "Pohozaev slack %.2e, %.1f s",
              b.residual_norm, b.decay_exponent, p.slack, t));
  const GroundStateBundle c = petviashvili_solve(1.0, 1.0, GridSpec::square(256, 64.0));
  info("256^2 L=64: residual %.2e, decay exponent %.3f, Pohozaev slack %.2e",
       c.residual_norm, c.decay_exponent, pohozaev_check(c.Q, 1.0).slack);
}

void criterion4() {
  const auto t0 = Clock::now();
  const GroundStateBundle b = petviashvili_solve(1.0, 1.0, GridSpec::square(1024, 64.0));
  const SpectrumBundle sp = lowest_eigenpair(b.Q);
  const double asym = rotation_asymmetry(sp.psi0);
  const double coer = coercivity_probe(b.Q, sp.psi0, 200, 12345);
  const double t = seconds_since(t0);
  // The identity L(Lambda Q) = -Q holds on the plane; on a torus the dilation
  // family changes the period and the residual falls off with the box, so it
  // is checked on a wide box at the same spacing.
  const auto t1 = Clock::now();
  auto lambda_residual = [](int n, double L) {
    const GroundStateBundle s = petviashvili_solve(1.0, 1.0, GridSpec::square(n, L));
    RealField r = apply_L(scaling_generator(s.Q), s.Q);
    r += s.Q;
    return l2_norm(r) / l2_norm(s.Q);
  };
  const double lq = lambda_residual(3072, 192.0);
  const double tl = seconds_since(t1);
  verdict(4,
          sp.mu0 > 0.0 && sp.kernel_residual_x1 < 1e-3 && asym < 1e-6 &&
              lq < 1e-3 && coer > 0.0 && t < 300.0,
          fmt("spectrum 1024^2 L=64: mu0 %.6f, |L d1Q|/|d1Q| %.2e, psi0 "
              "asymmetry %.2e, coercivity min %.4f over 200 trials, %.1f s; "
              "3072^2 L=192: |L(Lambda Q)+Q|/|Q| %.2e, %.1f s",
              sp.mu0, sp.kernel_residual_x1, asym, coer, t, lq, tl));
  info("eigen residual %.2e, |L d2Q|/|d2Q| %.2e, psi0 decay exponent %.3f",
       sp.eigen_residual, sp.kernel_residual_x2, decay_exponent_fit(sp.psi0));
  for (double L : {16.0, 32.0, 64.0})
    info("box L=%g h=1/16: |L(Lambda Q)+Q|/|Q| = %.2e", L,
         lambda_residual(static_cast<int>(16 * L), L));
}

void criterion5() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  const auto probes2 = probe_family(GridSpec::square(256, 128.0));
  for (double gamma : {1.0, 1.5}) {
    WeightParams w;
    w.gamma = gamma;
    const Lemma1Sweep s = lemma1_sweep(probes2, w, 1.0, 0.5, false, false);
    ok = ok && s.reports.size() == 50 && s.min_slack >= -1e-12 && std::isfinite(s.c2);
    detail += fmt("n=2 gamma=%g c2=%.4g min slack %.2e seam %.1e; ", gamma, s.c2,
                  s.min_slack, s.max_seam);
  }
  const auto probes1 = probe_family(GridSpec::line(2048, 512.0));
  WeightParams w;
  const Lemma1Sweep s = lemma1_sweep(probes1, w, 1.0, 1.0);
  ok = ok && s.reports.size() == 50 && s.min_slack >= -1e-12 && std::isfinite(s.c2);
  detail += fmt("n=1 c1=1 c2=%.4g min slack %.2e; ", s.c2, s.min_slack);
  const double t = seconds_since(t0);
  verdict(5, ok && t < 60.0, detail + fmt("%.1f s", t));
}

void criterion6() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> a(1.0, 2.0), s1(0.0, 2.0), s2(-3.0, 3.0);
  int admissible = 0, admissible_pd = 0, outside_pd = 0;
  std::array<double, 3> example{};
  for (int k = 0; k < 10000; ++k) {
    const double alpha = a(rng);
    const std::array<double, 2> sigma{s1(rng), s2(rng)};
    const bool pd = matrix_M_is_pd(matrix_M_build(alpha, {sigma[0], sigma[1]}));
    if (sigma_condition(alpha, sigma, 2)) {
      ++admissible;
      admissible_pd += pd ? 1 : 0;
    } else if (pd) {
      if (outside_pd == 0) example = {alpha, sigma[0], sigma[1]};
      ++outside_pd;
    }
  }
  const double t = seconds_since(t0);
  verdict(6, admissible > 0 && admissible_pd == admissible && outside_pd > 0 && t < 5.0,
          fmt("matrix M: %d/%d admissible samples positive definite, %d "
              "inadmissible but positive definite, %.2f s",
              admissible_pd, admissible, outside_pd, t));
  if (outside_pd > 0)
    info("first inadmissible positive definite sample: alpha %.4f sigma (%.4f, %.4f)",
         example[0], example[1], example[2]);
}

void criterion7() {
  const GridSpec g = GridSpec::line(2048, 512.0);
  bool ok = true;
  std::string detail = "corollary c2 vs M in {1,2,4,8}, 1D dilated probes:";
  for (double alpha : {1.0, 1.5}) {
    std::vector<double> Ms, c2s;
    for (double M : {1.0, 2.0, 4.0, 8.0}) {
      ProbeFamily fam;
      fam.max_width = 2.0;
      fam.centre_fraction = 1.0 / 64.0;
      fam.dilation = M;
      WeightParams w;
      w.m_scale = M;
      const Lemma1Sweep s = corollary_sweep(probe_family(g, fam), w, alpha);
      Ms.push_back(M);
      c2s.push_back(s.c2);
    }
    bool positive = true;
    for (double c : c2s) positive = positive && c > 0.0;
    const double slope = positive ? loglog_slope(Ms, c2s) : std::nan("");
    ok = ok && positive && std::abs(slope + alpha) <= 0.3;
    detail += fmt(" alpha=%g slope %.4f (c2 %.4g..%.4g);", alpha, slope, c2s.front(),
                  c2s.back());
  }
  verdict(7, ok, detail);
}

void criterion8() {
  bool ok = true;
  std::string detail = "kernel Omega sup over window / inner value:";
  struct Case {
    int dim;
    double alpha;
  };
  for (const Case c : {Case{1, 1.0}, Case{2, 1.0}, Case{2, 1.5}}) {
    const GridSpec g = c.dim == 1 ? GridSpec::line(1024, 1024.0)
                                  : GridSpec::square(512, 512.0);
    const OmegaReport r = omega_decay_check(kernel_Omega(c.alpha, g), c.alpha);
    ok = ok && r.ratio <= 10.0;
    detail += fmt(" (n=%d, alpha=%g) %.3f;", c.dim, c.alpha, r.ratio);
  }
  verdict(8, ok, detail);
}

void criterion9() {
  const auto t0 = Clock::now();
  // Linear plane wave on the production box.
  SimConfig lin;
  lin.grid = GridSpec::square(256, 32.0);
  lin.dt = 0.01;
  lin.t_end = 1.0;
  lin.nonlinearity = false;
  const double k1 = 2 * pi * 3 / 32.0, k2 = 2 * pi * 2 / 32.0;
  const double w = k1 * std::hypot(k1, k2);
  auto wave = [&](double t) {
    return RealField::from_function(lin.grid, [&](const Point& x) {
      return std::cos(k1 * x[0] + k2 * x[1] + w * t);
    });
  };
  const DiagnosticSeries ls = run(lin, wave(0.0));
  const double lin_err = max_abs(ls.last_state->u - wave(ls.last_state->t));

  // Soliton transport with the dealiased discrete ground state.
  GroundStateOptions o;
  o.dealias = true;
  const GridSpec g = GridSpec::square(256, 32.0);
  const GroundStateBundle b = petviashvili_solve(1.0, 1.0, g, {}, o);
  const RealField target = translate(b.Q, {5.0, 0.0});
  std::vector<double> errs;
  double speed = 0.0, mass_drift = 0.0, energy_drift = 0.0;
  for (double dt : {0.0025, 0.00125, 0.000625}) {
    SimConfig c;
    c.grid = g;
    c.dt = dt;
    c.t_end = 5.0;
    c.diagnostics_every = 200;
    const DiagnosticSeries s = run(c, b.Q);
    const RealField& u = s.last_state->u;
    errs.push_back(l2_norm(u - target) / l2_norm(target));
    speed = tube_distance(u, b.Q).shift[0] / s.last_state->t;
    const double m0 = s.rows.front()[1], e0 = s.rows.front()[2];
    const double d0 = 0.5 * homogeneous_half_energy(b.Q, 1.0);
    mass_drift = 0.0;
    energy_drift = 0.0;
    for (const auto& r : s.rows) {
      mass_drift = std::max(mass_drift, std::abs(r[1] - m0) / m0);
      energy_drift = std::max(energy_drift, std::abs(r[2] - e0) / d0);
    }
  }
  const double f1 = errs[0] / errs[1], f2 = errs[1] / errs[2];
  const double t = seconds_since(t0);
  const bool ok = lin_err < 1e-10 && std::abs(speed - 1.0) < 0.01 && errs[2] < 1e-3 &&
                  mass_drift < 1e-8 && energy_drift < 1e-6 && f1 >= 10 && f1 <= 24 &&
                  f2 >= 10 && f2 <= 24 && t < 300.0;
  verdict(9, ok,
          fmt("evolution 256^2 L=32: plane wave error %.2e; soliton speed %.5f, "
              "shape error %.2e at t=5; mass drift %.2e, energy drift %.2e; "
              "dt-halving factors %.1f, %.1f; %.1f s",
              lin_err, speed, errs[2], mass_drift, energy_drift, f1, f2, t));
  info("%s", "energy drift is relative to the dispersive energy (1/2)|| |D|^{1/2} Q ||^2");
}

struct InstabilityRun {
  fs::path dir;
  bool ran = false;
};

InstabilityRun criterion10(const fs::path& configs, const fs::path& out) {
  InstabilityRun ir{out / "instability_a"};
  const ExperimentConfig cfg = load_config(configs / "instability.cfg");
  const auto t0 = Clock::now();
  CommandOutput co;
  try {
    co = run_command(cfg, ir.dir);
  } catch (const Error& e) {
    verdict(10, false, std::string("instability run failed: ") + e.what());
    return ir;
  }
  ir.ran = true;
  const double t = seconds_since(t0);
  const InstabilityResult& r = *co.instability;
  for (const std::string& l : co.lines) info("%s", l.c_str());

  // Early growth rate for n in {20, 40, 80}; the short runs stop at s = 2.
  std::vector<double> ns{20.0, 40.0, 80.0}, rates;
  for (double n : ns) {
    if (n == 40.0) {
      rates.push_back(r.early_dK_ds);
      continue;
    }
    ExperimentConfig c = cfg;
    c.set("n_index", std::to_string(static_cast<int>(n)));
    c.set("t_end", "2");
    const CommandOutput o = run_command(c, out / ("instability_n" + std::to_string(static_cast<int>(n))));
    rates.push_back(o.instability->early_dK_ds);
  }
  bool rates_positive = true;
  for (double v : rates) rates_positive = rates_positive && v > 0.0;
  const double slope = rates_positive ? loglog_slope(ns, rates) : std::nan("");

  // Right mass against x0, taken as the largest value over the run.
  const std::vector<double> x0 = cfg.list("x0_list", {});
  std::vector<double> peak(x0.size(), 0.0);
  for (const VirialRecord& v : r.records)
    for (std::size_t k = 0; k < x0.size(); ++k) peak[k] = std::max(peak[k], v.right_mass[k]);
  bool peaks_positive = true;
  for (double v : peak) peaks_positive = peaks_positive && v > 0.0;
  const double decay = peaks_positive ? -loglog_slope(x0, peak) : std::nan("");

  double wmax = 0.0;
  for (const VirialRecord& v : r.records) wmax = std::max(wmax, v.weighted_mass);
  const double w0 = r.records.front().weighted_mass;

  const bool growth = r.avg_dK_ds > 0.0;
  const bool escape = r.max_tube_ratio > 3.0 || r.K_increasing;
  const bool scaling = std::abs(slope + 1.0) <= 0.3;
  const bool ok = r.mass_drift < 1e-6 && r.energy_drift < 1e-5 && growth && escape &&
                  scaling && t < 1800.0 && decay >= 1.0 && wmax <= 5.0 * w0 &&
                  r.s_last >= 19.0;
  verdict(10, ok,
          fmt("instability n=40 to s=%.2f: M[eps] drift %.2e, energy identity %.2e, "
              "mean dK/ds %.4f, tube ratio %.2f, K strictly increasing %s, early "
              "dK/ds slope in n %.3f, right-mass exponent %.2f, weighted mass "
              "max/initial %.2f, %.0f s",
              r.s_last, r.mass_drift, r.energy_drift, r.avg_dK_ds, r.max_tube_ratio,
              r.K_increasing ? "yes" : "no", slope, decay, wmax / w0, t));
  info("early dK/ds for n=20,40,80: %.4g %.4g %.4g; lower bound for n=40 %.4g", rates[0],
       rates[1], rates[2], r.lower_bound);
  info("right mass peaks for x0=%g,%g,%g: %.3e %.3e %.3e", x0[0], x0[1], x0[2], peak[0],
       peak[1], peak[2]);
  {
    // On the torus the strip ahead of the soliton fills with radiation that
    // wrapped across the seam; this shows when the decay in x0 is lost.
    std::string line;
    for (double target : {0.0, 1.0, 2.0, 5.0, 10.0, 20.0}) {
      const VirialRecord* rec = &r.records.front();
      for (const VirialRecord& v : r.records)
        if (std::abs(v.s - target) < std::abs(rec->s - target)) rec = &v;
      line += fmt(" s=%.1f:%.2f", rec->s, -loglog_slope(x0, rec->right_mass));
    }
    info("right-mass exponent over time:%s", line.c_str());
  }
  info("largest linearization residual of the energy %.2e", r.max_linearization_residual);
  {
    std::vector<double> s, lam, z, a, b, e;
    for (const VirialRecord& v : r.records) {
      s.push_back(v.s);
      lam.push_back(v.lambda);
      z.push_back(v.z1);
      a.push_back(v.a_ode);
      b.push_back(v.b_ode);
      e.push_back(v.eps_l2);
    }
    const OdeResidualReport o = modulation_ode_residual(s, lam, z, a, b, e, 1.0, 10.0);
    info("modulation equations on s in [1,10]: max discrepancy %.3e, max bound ratio "
         "%.3e over %d samples",
         o.max_discrepancy, o.max_bound_ratio, o.samples);
  }
  return ir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void criterion11(const fs::path& configs, const fs::path& out,
                 const InstabilityRun& previous) {
  bool ok = true;
  int compared = 0;
  std::string detail;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(configs))
    if (e.path().extension() == ".cfg") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) {
    const ExperimentConfig cfg = load_config(f);
    const std::string stem = f.stem().string();
    fs::path a = out / (stem + "_a"), b = out / (stem + "_b");
    try {
      if (cfg.command == "instability" && previous.ran) {
        a = previous.dir;
      } else {
        fs::remove_all(a);
        run_command(cfg, a);
      }
      fs::remove_all(b);
      run_command(cfg, b);
    } catch (const Error& e) {
      ok = false;
      detail += stem + " failed (" + e.what() + "); ";
      continue;
    }
    int n = 0;
    bool same = true;
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() != ".csv") continue;
      ++n;
      const fs::path other = b / e.path().filename();
      same = same && fs::exists(other) && slurp(e.path()) == slurp(other);
    }
    ok = ok && same && n > 0;
    compared += n;
    detail += fmt("%s %s; ", stem.c_str(), same && n > 0 ? "identical" : "DIFFERENT");
  }
  verdict(11, ok && compared > 0, fmt("determinism, %d CSV files: ", compared) + detail);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path configs = argc > 1 ? fs::path(argv[1]) : fs::path("configs");
  const fs::path out = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "fdisp_acceptance";
  fs::create_directories(out);
  const auto t0 = Clock::now();
  auto guarded = [](int id, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      verdict(id, false, std::string("aborted: ") + e.what());
    }
  };
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  guarded(6, criterion6);
  guarded(7, criterion7);
  guarded(8, criterion8);
  guarded(9, criterion9);
  InstabilityRun ir;
  guarded(10, [&] { ir = criterion10(configs, out); });
  guarded(11, [&] { criterion11(configs, out, ir); });
  std::printf("%d criteria failed, %.0f s in total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
