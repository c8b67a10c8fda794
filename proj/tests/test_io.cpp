#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "fdisp/error.hpp"
#include "fdisp/fourier.hpp"
#include "fdisp/io.hpp"
#include "fdisp/linearized.hpp"

using namespace fdisp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fdisp_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("config defaults and getters") {
  const ExperimentConfig c = parse_config("command = simulate\n");
  CHECK(c.command == "simulate");
  CHECK(c.real("alpha", 1.0) == 1.0);
  CHECK(c.integer("nx", 256) == 256);
  const ExperimentConfig d = parse_config(
      "# comment\ncommand = instability\nalpha = 1.5\nnx = 128\n"
      "dealias = true\nx0_list = 2, 4, 8\n");
  CHECK(d.real("alpha", 1.0) == 1.5);
  CHECK(d.integer("nx", 0) == 128);
  CHECK(d.flag("dealias", false));
  CHECK(d.list("x0_list", {}) == std::vector<double>{2, 4, 8});
}

TEST_CASE("config errors carry the line") {
  const std::string gamma = message("command = check-monotonicity\n\ngamma = 2\n");
  CHECK(gamma.find("line 3") == 0);
  CHECK(gamma.find("(0.5, 1]") != std::string::npos);
  CHECK(message("command = simulate\nbogus = 1\n").find("line 2") == 0);
  CHECK(message("command = simulate\nnx = many\n").find("line 2") == 0);
  CHECK(message("command = simulate\ndt = 1\ndt = 2\n").find("line 3") == 0);
  CHECK(message("command = simulate\nnx = 15\n").find("line 2") == 0);
  CHECK(message("command = simulate\nalpha = 0.5\n").find("line 2") == 0);
  CHECK_FALSE(message("alpha = 1\n").empty());
  CHECK_FALSE(message("command = nope\n").empty());
  CHECK(message("command = check-monotonicity\ngamma = 2\nallow_gamma_outside = true\n")
            .empty());
}

TEST_CASE("config round trip") {
  const std::string text =
      "command = instability\nalpha = 1\nnx = 256\nLx = 32\ndt = 0.001\n"
      "x0_list = 2, 4, 8\nflip_sign = false\nscheme = etdrk4\nnu = 0.25\n";
  const ExperimentConfig c = parse_config(text);
  const ExperimentConfig again = parse_config(serialize_config(c));
  CHECK(again == c);
  CHECK(serialize_config(again) == serialize_config(c));
}

TEST_CASE("shipped configs parse and round trip") {
  const fs::path dir = fs::path(FDISP_SOURCE_DIR) / "configs";
  int count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    const ExperimentConfig c = load_config(entry.path());
    CHECK(parse_config(serialize_config(c)) == c);
    ++count;
  }
  CHECK(count >= 6);
}

TEST_CASE("checkpoint round trip is bit exact") {
  const GridSpec g = GridSpec::square(32, 10.0);
  const RealField f = random_smooth_field(g, 17);
  const fs::path p = scratch("state.bin");
  save_checkpoint(f, 1.25, 0.375, p);
  const Checkpoint c = load_checkpoint(p, g);
  CHECK(c.alpha == 1.25);
  CHECK(c.t == 0.375);
  bool same = true;
  for (std::size_t k = 0; k < f.size(); ++k) same = same && f[k] == c.field[k];
  CHECK(same);
  CHECK(c.field.grid().describe() == g.describe());
  save_checkpoint(c.field, c.alpha, c.t, scratch("again.bin"));
  CHECK(slurp(p) == slurp(scratch("again.bin")));

  CHECK_THROWS_AS(load_checkpoint(p, GridSpec::square(64, 10.0)), ValidationError);
  CHECK_THROWS_AS(load_checkpoint(scratch("missing.bin")), IoError);

  const std::string bytes = slurp(p);
  write_atomic(scratch("short.bin"), bytes.substr(0, bytes.size() - 8));
  CHECK_THROWS_AS(load_checkpoint(scratch("short.bin")), IoError);
  write_atomic(scratch("bad.bin"), "GARBAGE\n" + bytes);
  CHECK_THROWS_AS(load_checkpoint(scratch("bad.bin")), IoError);
}

TEST_CASE("csv output") {
  CsvTable one{{"t", "mass"}, {{0.5, 1.0 / 3.0}}};
  const std::string text = format_csv(one);
  CHECK(text == "t,mass\n0.5,0.33333333333333331\n");
  CHECK_THROWS_AS(emit_csv(CsvTable{{"t"}, {}}, scratch("empty.csv")),
                  ValidationError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  CsvTable big{{"a", "b", "c"}, {}};
  for (int i = 0; i < 100000; ++i) big.rows.push_back({u(rng), u(rng), i * 1e-7});
  emit_csv(big, scratch("big.csv"));
  const CsvTable back = read_csv(scratch("big.csv"));
  CHECK(back.columns == big.columns);
  REQUIRE(back.rows.size() == big.rows.size());
  CHECK(back.rows == big.rows);
}

TEST_CASE("output directory follows the environment") {
  setenv("FDISP_OUTPUT_DIR", "/tmp/fdisp-out", 1);
  CHECK(output_directory() == fs::path("/tmp/fdisp-out"));
  unsetenv("FDISP_OUTPUT_DIR");
  CHECK(output_directory() == fs::current_path());
}
