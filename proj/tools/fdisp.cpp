// Command-line front end: one experiment per invocation.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "fdisp/commands.hpp"
#include "fdisp/error.hpp"
#include "fdisp/io.hpp"

namespace {

std::string dashed(std::string key) {
  for (char& ch : key)
    if (ch == '_') ch = '-';
  return key;
}

int exit_code(const fdisp::Error& e) {
  switch (e.kind()) {
    case fdisp::ErrorKind::validation: return 1;
    case fdisp::ErrorKind::numerical: return 2;
    case fdisp::ErrorKind::io: return 3;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral experiments for fractional ZK / Shrira / BO"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app = nullptr;
    std::string config;
    std::string grid;
    std::map<std::string, std::string> values;
  };
  std::map<std::string, Sub> subs;
  for (const std::string& name : fdisp::known_commands()) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name);
    s.app->add_option("--config", s.config, "key = value config file");
    s.app->add_option("--grid", s.grid, "points per axis, N or NxM");
    for (const std::string& key : fdisp::known_keys()) {
      if (key == "command") continue;
      s.app->add_option("--" + dashed(key), s.values[key]);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      fdisp::ExperimentConfig cfg;
      if (!s.config.empty()) {
        cfg = fdisp::load_config(s.config, name);
      } else {
        cfg.command = name;
      }
      // Flags override the file.
      for (const auto& [key, raw] : s.values)
        if (s.app->count("--" + dashed(key)) > 0) cfg.set(key, raw);
      if (!s.grid.empty()) {
        const auto x = s.grid.find('x');
        cfg.set("nx", s.grid.substr(0, x));
        cfg.set("ny", x == std::string::npos ? s.grid : s.grid.substr(x + 1));
      }
      fdisp::validate_config(cfg);
      const fdisp::CommandOutput out =
          fdisp::run_command(cfg, fdisp::output_directory());
      for (const std::string& line : out.lines) std::cout << line << "\n";
      std::cout.flush();
    }
  } catch (const fdisp::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
