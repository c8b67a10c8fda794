#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fdisp/io.hpp"
#include "fdisp/modulation.hpp"

namespace fdisp {

struct CommandOutput {
  /// Lines for standard output (a CSV header plus a row, or a verdict).
  std::vector<std::string> lines;
  std::vector<std::filesystem::path> files;
  std::optional<InstabilityResult> instability;
};

/// Runs one experiment and writes its files into `dir`. Parameters are
/// validated before any computation starts.
CommandOutput run_command(const ExperimentConfig& cfg,
                          const std::filesystem::path& dir);

/// Grid from dim / nx / ny / Lx / Ly with per-command defaults.
GridSpec grid_from(const ExperimentConfig& cfg, int default_n,
                   double default_L);

InstabilityConfig instability_config_from(const ExperimentConfig& cfg);

/// virial.csv columns: s, lambda, z1, J_A, K_A, dK_ds, tube_distance, t,
/// eps_mass, energy, energy_scaled, weighted_mass, a, b.
CsvTable virial_table(const InstabilityResult& r);
/// rightmass.csv columns: s, x0, value.
CsvTable right_mass_table(const InstabilityResult& r,
                          const std::vector<double>& x0_list);

}  // namespace fdisp
