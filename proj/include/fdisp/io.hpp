#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fdisp/field.hpp"

namespace fdisp {

using ConfigValue =
    std::variant<bool, long, double, std::string, std::vector<double>>;

enum class ValueType { boolean, integer, real, text, real_list };

/// Parsed `key = value` experiment description. Unset keys fall back to the
/// defaults passed to the getters.
struct ExperimentConfig {
  std::string command;
  std::map<std::string, ConfigValue> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  double real(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> list(const std::string& key,
                           const std::vector<double>& fallback) const;

  /// Sets a key from its textual form, checking it against the schema.
  void set(const std::string& key, const std::string& raw);

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

const std::vector<std::string>& known_commands();
/// Type of a recognised key; empty for unknown keys.
std::optional<ValueType> key_type(const std::string& key);
std::vector<std::string> known_keys();

/// Parses config text. `command` (when given) overrides the file's command
/// key; a command must come from one of the two. Errors carry the line
/// number of the first offending line.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& command = "");
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::string& command = "");

/// Canonical text form: `command` first, then keys in sorted order, reals
/// with 17 significant digits. parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& c);

/// Cross-key constraints that do not belong to a single module, e.g. the
/// admissible gamma interval for the monotonicity weight.
void validate_config(const ExperimentConfig& c);

struct Checkpoint {
  RealField field;
  double alpha = 1.0;
  double t = 0.0;
};

/// Header line then raw little-endian doubles, written to a temporary file
/// and renamed into place.
void save_checkpoint(const RealField& f, double alpha, double t,
                     const std::filesystem::path& path);
/// Throws IoError on unreadable, truncated or malformed files and
/// ValidationError when `expected` is given and the grid differs.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<GridSpec>& expected = {});

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Header row, then one row per record with 17 significant digits. Written
/// atomically; an empty table is a ValidationError.
void emit_csv(const CsvTable& table, const std::filesystem::path& path);
std::string format_csv(const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// %.17g.
std::string format_real(double v);

/// Writes `text` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& text);

/// Directory named by FDISP_OUTPUT_DIR, or the working directory.
std::filesystem::path output_directory();

}  // namespace fdisp
