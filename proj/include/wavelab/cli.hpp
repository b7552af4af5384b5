#pragma once

// Flat key = value configs, experiment dispatch, CSV/SVG output and the
// command-line entry point.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wavelab {

using ConfigValue =
    std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>>;

/// Parsed config. Grammar per line: `key = value` with value one of a quoted
/// string, true/false, a decimal or scientific number (inf allowed), or a
/// bracketed list of numbers or of strings. `#` starts a comment.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& file);
  /// Canonical text; parse(emit()) == *this.
  std::string emit() const;

  bool contains(std::string_view key) const;
  void set(const std::string& key, ConfigValue value);
  const std::map<std::string, ConfigValue, std::less<>>& entries() const noexcept { return entries_; }

  // Typed getters. A missing key returns the fallback or throws ConfigError.
  double number(std::string_view key, std::optional<double> fallback = std::nullopt) const;
  std::int64_t integer(std::string_view key, std::optional<std::int64_t> fallback = std::nullopt) const;
  std::string text(std::string_view key, std::optional<std::string> fallback = std::nullopt) const;
  bool flag(std::string_view key, std::optional<bool> fallback = std::nullopt) const;
  std::vector<double> numbers(std::string_view key,
                              std::optional<std::vector<double>> fallback = std::nullopt) const;
  std::vector<std::string> texts(std::string_view key,
                                 std::optional<std::vector<std::string>> fallback = std::nullopt) const;

  /// Throws ConfigError naming every key outside `known`.
  void expect_keys(std::span<const std::string_view> known) const;

  bool operator==(const Config&) const = default;

 private:
  const ConfigValue& at(std::string_view key) const;
  std::map<std::string, ConfigValue, std::less<>> entries_;
};

/// printf %.17g (round-trips every double).
std::string format_double(double v);

enum class Experiment {
  rarefaction_stability,
  shock_instability,
  area_check,
  area_witness,
  oracle_compare,
  simulate,
};

std::string_view to_string(Experiment e) noexcept;
Experiment parse_experiment(std::string_view name);
std::span<const Experiment> all_experiments() noexcept;

struct RunConfig {
  Experiment experiment = Experiment::simulate;
  Config params;
  std::filesystem::path output_dir = ".";
  bool emit_svg = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> paths;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunResult {
  std::vector<Check> checks;
  std::vector<std::filesystem::path> files;

  bool ok() const;
  /// One `FAILED\t<name>\t<detail>` line per failing check.
  std::string failure_list() const;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(std::string_view name) const;
};

/// Header row then rows of %.17g values; all columns must have equal length.
void write_csv(const std::filesystem::path& file, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& file);

struct SvgSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line plot; non-positive values are dropped on logarithmic axes.
void write_svg(const std::filesystem::path& file, std::string_view title,
               const std::vector<SvgSeries>& series, bool log_x, bool log_y);

/// Runs one experiment, writing its files into cfg.output_dir. Throws
/// ConfigError for bad parameters and Error for failed runs.
RunResult run_experiment(const RunConfig& cfg, std::ostream& log);

/// Whole command line: returns 0 when every enabled check passes, 1 when a
/// check fails, 2 for usage or config errors, 3 when a run fails.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wavelab
