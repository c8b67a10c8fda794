#include "fdisp/io.hpp"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fdisp/error.hpp"

namespace fdisp {
namespace {

const std::map<std::string, ValueType>& schema() {
  static const std::map<std::string, ValueType> s = {
      {"command", ValueType::text},
      {"alpha", ValueType::real},
      {"c", ValueType::real},
      {"dim", ValueType::integer},
      {"nx", ValueType::integer},
      {"ny", ValueType::integer},
      {"Lx", ValueType::real},
      {"Ly", ValueType::real},
      {"dealias", ValueType::boolean},
      {"max_iterations", ValueType::integer},
      {"tolerance", ValueType::real},
      {"coercivity_trials", ValueType::integer},
      {"dt", ValueType::real},
      {"t_end", ValueType::real},
      {"scheme", ValueType::text},
      {"nonlinearity", ValueType::boolean},
      {"diagnostics_every", ValueType::integer},
      {"checkpoint_every", ValueType::integer},
      {"initial", ValueType::text},
      {"initial_path", ValueType::text},
      {"amplitude", ValueType::real},
      {"width", ValueType::real},
      {"seed", ValueType::integer},
      {"probe_count", ValueType::integer},
      {"probe_min_width", ValueType::real},
      {"probe_max_width", ValueType::real},
      {"probe_centre_fraction", ValueType::real},
      {"probe_dilation", ValueType::real},
      {"sigma1", ValueType::real},
      {"sigma2", ValueType::real},
      {"weight_shift", ValueType::real},
      {"gamma", ValueType::real},
      {"m_scale", ValueType::real},
      {"c1", ValueType::real},
      {"corollary", ValueType::boolean},
      {"allow_gamma_outside", ValueType::boolean},
      {"n_index", ValueType::integer},
      {"flip_sign", ValueType::boolean},
      {"A", ValueType::real},
      {"x0_list", ValueType::real_list},
      {"m_exponent", ValueType::real},
      {"nu", ValueType::real},
      {"fit_interval", ValueType::real},
      {"eta_gamma", ValueType::real},
      {"eta_scale", ValueType::real},
      {"F_edge_tolerance", ValueType::real},
      {"tube_limit", ValueType::real},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_integer(const std::string& s, long& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && b != e;
}

ConfigValue parse_value(const std::string& key, ValueType type,
                        const std::string& raw) {
  auto bad = [&](const char* what) {
    return ValidationError("key '" + key + "' expects " + what + ", got '" +
                           raw + "'");
  };
  switch (type) {
    case ValueType::boolean: {
      std::string v = raw;
      std::transform(v.begin(), v.end(), v.begin(), ::tolower);
      if (v == "true" || v == "yes" || v == "1") return true;
      if (v == "false" || v == "no" || v == "0") return false;
      throw bad("a boolean");
    }
    case ValueType::integer: {
      long v = 0;
      if (!parse_integer(raw, v)) throw bad("an integer");
      return v;
    }
    case ValueType::real: {
      double v = 0.0;
      if (!parse_real(raw, v)) throw bad("a finite real number");
      return v;
    }
    case ValueType::text:
      if (raw.empty()) throw bad("a non-empty string");
      return raw;
    case ValueType::real_list: {
      std::vector<double> out;
      std::string item;
      std::string s = raw;
      std::replace(s.begin(), s.end(), ',', ' ');
      std::istringstream in(s);
      while (in >> item) {
        double v = 0.0;
        if (!parse_real(item, v)) throw bad("a list of real numbers");
        out.push_back(v);
      }
      if (out.empty()) throw bad("a non-empty list of real numbers");
      return out;
    }
  }
  throw bad("a value");
}

std::string format_value(const ConfigValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, long>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_real(x);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else {
          std::string s;
          for (std::size_t i = 0; i < x.size(); ++i)
            s += (i ? ", " : "") + format_real(x[i]);
          return s;
        }
      },
      v);
}

template <typename T>
const T* lookup(const ExperimentConfig& c, const std::string& key) {
  auto it = c.values.find(key);
  if (it == c.values.end()) return nullptr;
  const T* v = std::get_if<T>(&it->second);
  if (v == nullptr)
    throw ValidationError("key '" + key + "' has the wrong type");
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return ss.str();
}

}  // namespace

double ExperimentConfig::real(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  // Integers are accepted where reals are expected.
  if (const long* i = std::get_if<long>(&it->second))
    return static_cast<double>(*i);
  const double* v = lookup<double>(*this, key);
  return *v;
}

long ExperimentConfig::integer(const std::string& key, long fallback) const {
  const long* v = lookup<long>(*this, key);
  return v ? *v : fallback;
}

bool ExperimentConfig::flag(const std::string& key, bool fallback) const {
  const bool* v = lookup<bool>(*this, key);
  return v ? *v : fallback;
}

std::string ExperimentConfig::text(const std::string& key,
                                   const std::string& fallback) const {
  const std::string* v = lookup<std::string>(*this, key);
  return v ? *v : fallback;
}

std::vector<double> ExperimentConfig::list(
    const std::string& key, const std::vector<double>& fallback) const {
  const std::vector<double>* v = lookup<std::vector<double>>(*this, key);
  return v ? *v : fallback;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const auto type = key_type(key);
  if (!type) throw ValidationError("unknown key '" + key + "'");
  if (key == "command") {
    const auto& cmds = known_commands();
    if (std::find(cmds.begin(), cmds.end(), raw) == cmds.end())
      throw ValidationError("unknown command '" + raw + "'");
    command = raw;
    return;
  }
  values[key] = parse_value(key, *type, raw);
}

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c = {
      "ground-state",       "spectrum",     "simulate",
      "check-monotonicity", "kernel-decay", "instability"};
  return c;
}

std::optional<ValueType> key_type(const std::string& key) {
  auto it = schema().find(key);
  if (it == schema().end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> known_keys() {
  std::vector<std::string> k;
  for (const auto& [name, type] : schema()) k.push_back(name);
  return k;
}

ExperimentConfig parse_config(const std::string& text,
                              const std::string& command) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(number) + ": ";
    if (eq == std::string::npos)
      throw ValidationError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError(where + "missing key");
    if (seen.count(key))
      throw ValidationError(where + "key '" + key + "' repeats line " +
                            std::to_string(seen[key]));
    seen[key] = number;
    try {
      c.set(key, value);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  if (!command.empty()) c.set("command", command);
  if (c.command.empty())
    throw ValidationError("no command given in the config or on the command line");
  try {
    validate_config(c);
  } catch (const ValidationError& e) {
    // Point at the line of the key the constraint is about when possible.
    std::string msg = e.what();
    for (const auto& [key, line_no] : seen)
      if (msg.rfind(key + " ", 0) == 0)
        throw ValidationError("line " + std::to_string(line_no) + ": " + msg);
    throw;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::string& command) {
  return parse_config(read_file(path), command);
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out = "command = " + c.command + "\n";
  for (const auto& [key, value] : c.values)
    out += key + " = " + format_value(value) + "\n";
  return out;
}

void validate_config(const ExperimentConfig& c) {
  const double alpha = c.real("alpha", 1.0);
  if (!(alpha >= 1.0 && alpha <= 2.0))
    throw ValidationError("alpha = " + format_real(alpha) +
                          " lies outside [1, 2]");
  if (c.has("gamma") && !c.flag("allow_gamma_outside", false)) {
    const double g = c.real("gamma", 1.0);
    const double hi = 0.5 * (alpha + 1.0);
    if (!(g > 0.5 && g <= hi))
      throw ValidationError(
          "gamma = " + format_real(g) +
          " lies outside the monotonicity interval (1/2, (alpha+1)/2] = (0.5, " +
          format_real(hi) + "]");
  }
  const long dim = c.integer("dim", 2);
  if (dim != 1 && dim != 2)
    throw ValidationError("dim = " + std::to_string(dim) + " must be 1 or 2");
  for (const char* key : {"nx", "ny"})
    if (c.has(key) && (c.integer(key, 16) < 16 || c.integer(key, 16) % 2))
      throw ValidationError(std::string(key) + " must be even and at least 16");
  for (const char* key : {"Lx", "Ly", "dt", "t_end", "c"})
    if (c.has(key) && !(c.real(key, 1.0) > 0.0))
      throw ValidationError(std::string(key) + " must be positive");
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path(), ec);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void save_checkpoint(const RealField& f, double alpha, double t,
                     const std::filesystem::path& path) {
  const GridSpec& g = f.grid();
  std::string head = "FDISP1 dim=" + std::to_string(g.dim()) +
                     " nx=" + std::to_string(g.nx());
  if (g.dim() == 2) head += " ny=" + std::to_string(g.ny());
  head += " Lx=" + format_real(g.length(0));
  if (g.dim() == 2) head += " Ly=" + format_real(g.length(1));
  head += " alpha=" + format_real(alpha) + " t=" + format_real(t) + "\n";
  std::string text = head;
  text.resize(head.size() + 8 * f.size());
  char* p = text.data() + head.size();
  for (std::size_t k = 0; k < f.size(); ++k, p += 8) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(f[k]);
    for (int b = 0; b < 8; ++b) p[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  write_atomic(path, text);
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<GridSpec>& expected) {
  const std::string data = read_file(path);
  const auto nl = data.find('\n');
  const std::string name = path.string();
  if (nl == std::string::npos || nl > 512)
    throw IoError(name + ": missing checkpoint header");
  std::istringstream head(data.substr(0, nl));
  std::string token;
  head >> token;
  if (token != "FDISP1") throw IoError(name + ": not an FDISP1 checkpoint");
  std::map<std::string, std::string> kv;
  while (head >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0)
      throw IoError(name + ": malformed header token '" + token + "'");
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  auto get_real = [&](const std::string& k) {
    double v = 0.0;
    if (!kv.count(k) || !parse_real(kv[k], v))
      throw IoError(name + ": header lacks a valid " + k);
    return v;
  };
  auto get_int = [&](const std::string& k) {
    long v = 0;
    if (!kv.count(k) || !parse_integer(kv[k], v) || v < 1 || v > (1L << 20))
      throw IoError(name + ": header lacks a valid " + k);
    return static_cast<int>(v);
  };
  const int dim = get_int("dim");
  if (dim != 1 && dim != 2) throw IoError(name + ": dim must be 1 or 2");
  const int nx = get_int("nx");
  const double Lx = get_real("Lx");
  const int ny = dim == 2 ? get_int("ny") : 1;
  const double Ly = dim == 2 ? get_real("Ly") : 0.0;
  const double alpha = get_real("alpha");
  const double t = get_real("t");
  std::optional<GridSpec> grid;
  try {
    grid.emplace(dim, std::array<int, 2>{nx, ny}, std::array<double, 2>{Lx, Ly});
  } catch (const ValidationError& e) {
    throw IoError(name + ": invalid grid in header: " + e.what());
  }
  const std::size_t need = 8 * grid->size();
  const std::size_t have = data.size() - nl - 1;
  if (have != need)
    throw IoError(name + ": payload has " + std::to_string(have) +
                  " bytes, header implies " + std::to_string(need));
  if (expected && !(*expected == *grid))
    throw ValidationError(name + ": checkpoint grid " + grid->describe() +
                          " does not match " + expected->describe());
  RealField f(*grid);
  const unsigned char* p =
      reinterpret_cast<const unsigned char*>(data.data()) + nl + 1;
  for (std::size_t k = 0; k < f.size(); ++k, p += 8) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    f[k] = std::bit_cast<double>(bits);
  }
  return Checkpoint{std::move(f), alpha, t};
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out += (i ? "," : "") + table.columns[i];
  out += "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw ValidationError("csv row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i)
      out += (i ? "," : "") + format_real(row[i]);
    out += "\n";
  }
  return out;
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path) {
  if (table.rows.empty())
    throw ValidationError("refusing to write an empty series to " +
                          path.string());
  write_atomic(path, format_csv(table));
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  std::istringstream head(line);
  std::string cell;
  while (std::getline(head, cell, ',')) t.columns.push_back(cell);
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    while (std::getline(cells, cell, ',')) {
      double v = 0.0;
      if (!parse_real(cell, v) && cell != "nan" && cell != "inf" &&
          cell != "-inf")
        throw IoError(path.string() + ": bad number on line " +
                      std::to_string(number));
      if (cell == "nan") v = std::nan("");
      if (cell == "inf") v = HUGE_VAL;
      if (cell == "-inf") v = -HUGE_VAL;
      row.push_back(v);
    }
    if (row.size() != t.columns.size())
      throw IoError(path.string() + ": wrong column count on line " +
                    std::to_string(number));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::filesystem::path output_directory() {
  const char* dir = std::getenv("FDISP_OUTPUT_DIR");
  if (dir == nullptr || *dir == '\0') return std::filesystem::current_path();
  return std::filesystem::path(dir);
}

}  // namespace fdisp
