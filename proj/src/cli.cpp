#include "wavelab/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "wavelab/analysis.hpp"
#include "wavelab/deterministic.hpp"
#include "wavelab/errors.hpp"
#include "wavelab/experiments.hpp"
#include "wavelab/spde.hpp"
#include "wavelab/waves.hpp"

namespace wavelab {

// ---------------------------------------------------------------- config

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  if (key.empty() || !(std::isalpha(static_cast<unsigned char>(key[0])) || key[0] == '_')) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

class ValueParser {
 public:
  ValueParser(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  ConfigValue parse() {
    skip_space();
    ConfigValue v;
    if (peek() == '[') {
      v = parse_list();
    } else if (peek() == '"') {
      v = parse_string();
    } else {
      const std::string_view token = read_token();
      if (token == "true") v = true;
      else if (token == "false") v = false;
      else v = to_number(token);
    }
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing text '" + std::string(text_.substr(pos_)) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(what, line_); }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  std::string_view read_token() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != ' ' &&
           text_[pos_] != '\t') {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  double to_number(std::string_view token) const {
    if (token.empty()) fail("missing value");
    std::string_view body = token;
    if (body.front() == '+') body.remove_prefix(1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || end != body.data() + body.size() || std::isnan(v)) {
      fail("not a number: '" + std::string(token) + "'");
    }
    return v;
  }

  std::string parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size()) {
      const char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= text_.size()) break;
        const char e = text_[pos_++];
        if (e == 'n') out += '\n';
        else if (e == 't') out += '\t';
        else if (e == '"' || e == '\\') out += e;
        else fail(std::string("unknown escape \\") + e);
      } else {
        out += c;
      }
    }
    fail("unterminated string");
  }

  ConfigValue parse_list() {
    ++pos_;  // '['
    std::vector<double> numbers;
    std::vector<std::string> strings;
    skip_space();
    if (peek() == ']') {
      ++pos_;
      return numbers;
    }
    while (true) {
      skip_space();
      if (peek() == '"') strings.push_back(parse_string());
      else numbers.push_back(to_number(read_token()));
      if (!numbers.empty() && !strings.empty()) fail("lists must not mix strings and numbers");
      skip_space();
      const char c = peek();
      ++pos_;
      if (c == ']') break;
      if (c != ',') fail("expected ',' or ']' in list");
    }
    if (!strings.empty()) return strings;
    return numbers;
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

// Strips a trailing comment while respecting quoted strings.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
    } else if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') out += "\\n";
    else if (c == '\t') out += "\\t";
    else out += c;
  }
  return out + '"';
}

std::string emit_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

std::string type_name(const ConfigValue& v) {
  constexpr std::array<const char*, 5> names{"boolean", "number", "string", "number list",
                                             "string list"};
  return names[v.index()];
}

}  // namespace

Config Config::parse(std::string_view text) {
  Config cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'", line_no);
    if (cfg.entries_.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
    cfg.entries_.emplace(key, ValueParser(trim(line.substr(eq + 1)), line_no).parse());
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string Config::emit() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    out += key + " = ";
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, bool>) {
            out += v ? "true" : "false";
          } else if constexpr (std::is_same_v<T, double>) {
            out += emit_number(v);
          } else if constexpr (std::is_same_v<T, std::string>) {
            out += quote(v);
          } else {
            out += '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
              if (i) out += ", ";
              if constexpr (std::is_same_v<T, std::vector<double>>) out += emit_number(v[i]);
              else out += quote(v[i]);
            }
            out += ']';
          }
        },
        value);
    out += '\n';
  }
  return out;
}

bool Config::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

void Config::set(const std::string& key, ConfigValue value) {
  if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
  entries_.insert_or_assign(key, std::move(value));
}

const ConfigValue& Config::at(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing key '" + std::string(key) + "'");
  return it->second;
}

namespace {

template <class T>
const T& typed(const ConfigValue& v, std::string_view key, const char* expected) {
  if (const T* p = std::get_if<T>(&v)) return *p;
  throw ConfigError("key '" + std::string(key) + "' must be a " + expected + ", got a " + type_name(v));
}

}  // namespace

double Config::number(std::string_view key, std::optional<double> fallback) const {
  if (fallback && !contains(key)) return *fallback;
  return typed<double>(at(key), key, "number");
}

std::int64_t Config::integer(std::string_view key, std::optional<std::int64_t> fallback) const {
  if (fallback && !contains(key)) return *fallback;
  const double v = typed<double>(at(key), key, "number");
  if (!(std::abs(v) <= 9007199254740992.0) || v != std::floor(v)) {
    throw ConfigError("key '" + std::string(key) + "' must be an integer");
  }
  return static_cast<std::int64_t>(v);
}

std::string Config::text(std::string_view key, std::optional<std::string> fallback) const {
  if (fallback && !contains(key)) return *fallback;
  return typed<std::string>(at(key), key, "string");
}

bool Config::flag(std::string_view key, std::optional<bool> fallback) const {
  if (fallback && !contains(key)) return *fallback;
  return typed<bool>(at(key), key, "boolean");
}

std::vector<double> Config::numbers(std::string_view key,
                                    std::optional<std::vector<double>> fallback) const {
  if (fallback && !contains(key)) return *fallback;
  return typed<std::vector<double>>(at(key), key, "number list");
}

std::vector<std::string> Config::texts(std::string_view key,
                                       std::optional<std::vector<std::string>> fallback) const {
  if (fallback && !contains(key)) return *fallback;
  const ConfigValue& v = at(key);
  if (const auto* empty = std::get_if<std::vector<double>>(&v); empty && empty->empty()) return {};
  return typed<std::vector<std::string>>(v, key, "string list");
}

void Config::expect_keys(std::span<const std::string_view> known) const {
  std::string unknown;
  for (const auto& [key, value] : entries_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      unknown += (unknown.empty() ? "" : ", ") + key;
    }
  }
  if (!unknown.empty()) throw ConfigError("unknown key(s): " + unknown);
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

// ---------------------------------------------------------------- experiments

namespace {

constexpr std::array kExperiments{
    std::pair{Experiment::rarefaction_stability, std::string_view{"rarefaction-stability"}},
    std::pair{Experiment::shock_instability, std::string_view{"shock-instability"}},
    std::pair{Experiment::area_check, std::string_view{"area-check"}},
    std::pair{Experiment::area_witness, std::string_view{"area-witness"}},
    std::pair{Experiment::oracle_compare, std::string_view{"oracle-compare"}},
    std::pair{Experiment::simulate, std::string_view{"simulate"}},
};

constexpr std::array kExperimentList{
    Experiment::rarefaction_stability, Experiment::shock_instability, Experiment::area_check,
    Experiment::area_witness,          Experiment::oracle_compare,    Experiment::simulate,
};

}  // namespace

std::string_view to_string(Experiment e) noexcept {
  for (const auto& [k, name] : kExperiments) {
    if (k == e) return name;
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  for (const auto& [k, n] : kExperiments) {
    if (n == name) return k;
  }
  std::string all;
  for (const auto& [k, n] : kExperiments) all += (all.empty() ? "" : ", ") + std::string(n);
  throw ConfigError("unknown experiment '" + std::string(name) + "' (expected one of " + all + ")");
}

std::span<const Experiment> all_experiments() noexcept { return kExperimentList; }

bool RunResult::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string RunResult::failure_list() const {
  std::string out;
  for (const auto& c : checks) {
    if (!c.passed) out += "FAILED\t" + c.name + '\t' + c.detail + '\n';
  }
  return out;
}

// ---------------------------------------------------------------- csv / svg

const std::vector<double>& CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError("CSV has no column '" + std::string(name) + "'");
  return columns[static_cast<std::size_t>(it - header.begin())];
}

void write_csv(const std::filesystem::path& file, const CsvTable& table) {
  if (table.header.size() != table.columns.size()) {
    throw std::invalid_argument("write_csv: header and column counts differ");
  }
  const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
  for (const auto& c : table.columns) {
    if (c.size() != rows) throw std::invalid_argument("write_csv: columns differ in length");
  }
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      out << (j ? "," : "") << format_double(table.columns[j][i]);
    }
    out << '\n';
  }
  if (!out) throw Error("failed writing " + file.string());
}

CsvTable read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read CSV file " + file.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.emplace_back(trim(cell));
    if (table.header.empty()) {
      table.header = cells;
      table.columns.assign(cells.size(), {});
      continue;
    }
    if (cells.size() != table.header.size()) throw ConfigError("CSV row has wrong column count", line_no);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      const auto& c = cells[j];
      const auto [end, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || end != c.data() + c.size()) {
        throw ConfigError("CSV cell is not a number: '" + c + "'", line_no);
      }
      table.columns[j].push_back(v);
    }
  }
  if (table.header.empty()) throw ConfigError("CSV file is empty: " + file.string());
  return table;
}

void write_svg(const std::filesystem::path& file, std::string_view title,
               const std::vector<SvgSeries>& series, bool log_x, bool log_y) {
  constexpr double W = 720, H = 440, left = 70, right = 170, top = 40, bottom = 50;
  constexpr std::array<const char*, 6> palette{"#1f77b4", "#d62728", "#2ca02c",
                                               "#9467bd", "#ff7f0e", "#17becf"};
  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0) && (!log_y || y > 0);
  };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x0 < x1)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y0 < y1)) { y0 -= 0.5; y1 += 0.5; }
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (ty(y) - y0) / (y1 - y0) * (H - top - bottom); };
  auto label = [](double v, bool log) { return format_double(log ? std::pow(10.0, v) : v).substr(0, 10); };

  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << left << "\" y=\"24\" font-size=\"15\">" << title << "</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right
      << "\" height=\"" << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << left << "\" y=\"" << H - bottom + 18 << "\">" << label(x0, log_x) << "</text>\n"
      << "<text x=\"" << W - right << "\" y=\"" << H - bottom + 18 << "\" text-anchor=\"end\">"
      << label(x1, log_x) << "</text>\n"
      << "<text x=\"" << left - 6 << "\" y=\"" << H - bottom << "\" text-anchor=\"end\">"
      << label(y0, log_y) << "</text>\n"
      << "<text x=\"" << left - 6 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">"
      << label(y1, log_y) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = palette[k % palette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (usable(s.x[i], s.y[i])) out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    out << "\"/>\n<text x=\"" << W - right + 10 << "\" y=\"" << top + 16 * (k + 1) << "\" fill=\""
        << colour << "\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
}

namespace {

// Builds the check list, honouring an optional `checks = [...]` selection.
class CheckSet {
 public:
  CheckSet(const Config& cfg, std::vector<std::string> available, std::vector<std::string> defaults)
      : available_(std::move(available)) {
    const auto chosen = cfg.texts("checks", defaults);
    for (const auto& c : chosen) {
      if (std::find(available_.begin(), available_.end(), c) == available_.end()) {
        std::string all;
        for (const auto& a : available_) all += (all.empty() ? "" : ", ") + a;
        throw ConfigError("unknown check '" + c + "' (available: " + all + ")");
      }
      enabled_.insert(c);
    }
  }
  bool enabled(const std::string& name) const { return enabled_.count(name) > 0; }
  void add(RunResult& r, const std::string& name, bool passed, const std::string& detail) const {
    if (enabled(name)) r.checks.push_back({name, passed, detail});
  }

 private:
  std::vector<std::string> available_;
  std::set<std::string> enabled_;
};

std::string fmt(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.6g", v);
  return buf.data();
}

std::string p_label(double p) { return std::isinf(p) ? "inf" : format_double(p); }

std::size_t positive_count(const Config& c, std::string_view key, std::int64_t fallback) {
  const auto v = c.integer(key, fallback);
  if (v < 1) throw ConfigError("key '" + std::string(key) + "' must be >= 1");
  return static_cast<std::size_t>(v);
}

std::uint64_t seed_value(const Config& c, std::int64_t fallback = 1) {
  const auto v = c.integer("seed", fallback);
  if (v < 0) throw ConfigError("seed must be >= 0");
  return static_cast<std::uint64_t>(v);
}

std::pair<double, double> window_of(const Config& c, std::string_view key, std::pair<double, double> fallback) {
  const auto v = c.numbers(key, std::vector<double>{fallback.first, fallback.second});
  if (v.size() != 2 || !(v[0] < v[1])) {
    throw ConfigError("key '" + std::string(key) + "' must be [t_lo, t_hi] with t_lo < t_hi");
  }
  return {v[0], v[1]};
}

// Wraps invalid_argument from the numerical layer as config errors.
template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

struct Output {
  const RunConfig& cfg;
  RunResult& result;

  std::filesystem::path path(const std::string& suffix) const {
    return cfg.output_dir / (std::string(to_string(cfg.experiment)) + suffix);
  }
  void csv(const std::string& suffix, const CsvTable& t) const {
    const auto p = path(suffix);
    write_csv(p, t);
    result.files.push_back(p);
  }
  void svg(const std::string& suffix, std::string_view title, const std::vector<SvgSeries>& s,
           bool log_x, bool log_y) const {
    if (!cfg.emit_svg) return;
    const auto p = path(suffix);
    write_svg(p, title, s, log_x, log_y);
    result.files.push_back(p);
  }
};

// ---- rarefaction-stability

constexpr std::array<std::string_view, 26> kRarefactionKeys{
    "paths", "seed", "mu", "sigma", "u_minus", "u_plus", "T", "nodes", "half_width", "dt",
    "record_times", "record_count", "record_start", "p_list", "epsilon", "amplitude", "scheme",
    "track_far_field", "fit_window", "linf_fit_window", "max_linf_exponent", "normalized_p",
    "normalized_factor", "log_fit_max_residual", "moment_ratio_band", "checks"};

EnsembleConfig ensemble_from(const Config& c) {
  return guarded([&] {
    EnsembleConfig e;
    e.paths = positive_count(c, "paths", 64);
    e.base_seed = seed_value(c);
    e.noise = NoiseParams(c.number("mu", 0.2), c.number("sigma", 0.3));
    e.riemann = RiemannData(c.number("u_minus", -1.0), c.number("u_plus", 1.0));
    e.T = c.number("T", 200.0);
    const double half = c.number("half_width", default_half_width(e.riemann, e.T));
    e.grid = Grid::symmetric(half, positive_count(c, "nodes", 4096));
    e.dt = c.number("dt", 0.0);
    if (c.contains("record_times")) {
      e.record_times = c.numbers("record_times");
    } else {
      const auto count = positive_count(c, "record_count", 400);
      const double start = c.number("record_start", std::min(1.0, e.T));
      if (count < 2 || !(start > 0.0 && start < e.T)) {
        throw ConfigError("record_count must be >= 2 and record_start in (0, T)");
      }
      for (std::size_t k = 0; k < count; ++k) {
        e.record_times.push_back(start + (e.T - start) * static_cast<double>(k) /
                                             static_cast<double>(count - 1));
      }
      e.record_times.back() = e.T;
    }
    e.p_list = c.numbers("p_list", std::vector<double>{2.0, 4.0, 6.0, kInfinityNorm});
    e.epsilon = c.number("epsilon", 0.05);
    if (c.contains("amplitude")) e.perturbation_amplitude = c.number("amplitude");
    e.scheme = parse_scheme(c.text("scheme", "euler_maruyama"));
    e.track_far_field = c.flag("track_far_field", true);
    e.fit_window = window_of(c, "fit_window", {e.T / 10.0, e.T});
    e.validate();
    return e;
  });
}

void run_rarefaction(const RunConfig& rc, const Config& c, RunResult& result, std::ostream& log) {
  c.expect_keys(kRarefactionKeys);
  const EnsembleConfig e = ensemble_from(c);
  CheckSet checks(c, {"linf_exponent", "normalized_bound", "log_growth", "as_moment"},
                  {"linf_exponent", "normalized_bound", "log_growth", "as_moment"});
  log << "rarefaction-stability: " << e.paths << " paths, " << e.grid.size() << " nodes, T = " << e.T
      << '\n';
  const RarefactionResult r = rarefaction_stability(e);
  const Output out{rc, result};

  CsvTable table;
  table.header.push_back("t");
  table.columns.push_back(r.times);
  auto add = [&](const std::string& name, const SeriesStats& s) {
    table.header.push_back(name + "_mean");
    table.columns.push_back(s.mean);
    table.header.push_back(name + "_stderr");
    table.columns.push_back(s.std_error);
  };
  for (std::size_t q = 0; q < r.p_list.size(); ++q) add("lp" + p_label(r.p_list[q]), r.headline[q]);
  for (std::size_t q = 0; q < r.p_list.size(); ++q) add("phi_lp" + p_label(r.p_list[q]), r.perturbation[q]);
  for (std::size_t q = 0; q < r.p_list.size(); ++q) {
    if (!std::isinf(r.p_list[q])) add("phi_pow" + p_label(r.p_list[q]), r.perturbation_power[q]);
  }
  add("phi_l2sq", r.phi_l2_sq);
  add("phi_x_l2sq", r.phi_x_l2_sq);
  add("weighted_l2", r.weighted_l2);
  out.csv(".csv", table);

  CsvTable fits{{"p", "headline_exponent", "headline_constant", "headline_residual",
                 "phi_exponent", "phi_constant", "phi_residual", "t_lo", "t_hi"},
                std::vector<std::vector<double>>(9)};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t q = 0; q < r.p_list.size(); ++q) {
    const auto& h = r.headline_fits[q];
    const auto& f = r.perturbation_fits[q];
    const std::array<double, 9> row{r.p_list[q],
                                    h ? h->exponent : nan, h ? h->constant : nan, h ? h->residual : nan,
                                    f ? f->exponent : nan, f ? f->constant : nan, f ? f->residual : nan,
                                    r.fit_window.first, r.fit_window.second};
    for (std::size_t j = 0; j < row.size(); ++j) fits.columns[j].push_back(row[j]);
  }
  out.csv("-fits.csv", fits);

  std::vector<double> seeds(r.seeds.begin(), r.seeds.end());
  out.csv("-as-statistic.csv", {{"seed", "statistic"}, {seeds, r.as_statistic}});

  std::vector<SvgSeries> plot;
  for (std::size_t q = 0; q < r.p_list.size(); ++q) {
    plot.push_back({"||u-u^r||_" + p_label(r.p_list[q]), r.times, r.headline[q].mean});
  }
  out.svg(".svg", "mean distance to the rarefaction fan", plot, true, true);

  // checks
  const auto inf_it = std::find_if(r.p_list.begin(), r.p_list.end(), [](double p) { return std::isinf(p); });
  if (checks.enabled("linf_exponent")) {
    if (inf_it == r.p_list.end()) throw ConfigError("linf_exponent check needs inf in p_list");
    const auto window = window_of(c, "linf_fit_window", {e.T / 20.0, e.T});
    const auto& series = r.headline[static_cast<std::size_t>(inf_it - r.p_list.begin())];
    const RateFit fit = rate_fit(series.mean_series(r.times), window);
    const double limit = c.number("max_linf_exponent", -0.15);
    checks.add(result, "linf_exponent", fit.exponent <= limit,
               "exponent " + fmt(fit.exponent) + " on [" + fmt(window.first) + ", " +
                   fmt(window.second) + "], limit " + fmt(limit));
  }
  if (checks.enabled("normalized_bound")) {
    const double factor = c.number("normalized_factor", 2.0);
    for (double p : c.numbers("normalized_p", std::vector<double>{4.0, 6.0})) {
      const NormalizedBound b = guarded([&] { return normalized_power_bound(r, p); });
      checks.add(result, "normalized_bound", b.bounded(factor),
                 "p = " + fmt(p) + ": second-half max " + fmt(b.second_half_max) +
                     ", first-half max " + fmt(b.first_half_max) + ", factor " + fmt(factor));
    }
  }
  if (checks.enabled("log_growth")) {
    const LogGrowthFit g = fit_log_growth(r.phi_l2_sq.mean_series(r.times));
    const double share = c.number("log_fit_max_residual", 0.2);
    checks.add(result, "log_growth", g.residual <= share * g.range,
               "a = " + fmt(g.a) + ", b = " + fmt(g.b) + ", residual " + fmt(g.residual) +
                   ", range " + fmt(g.range) + ", allowed share " + fmt(share));
  }
  if (checks.enabled("as_moment")) {
    if (r.as_statistic.size() < 2) throw ConfigError("as_moment check needs >= 20 record times and 2 paths");
    const MomentStability m = second_moment_stability(r.as_statistic);
    const double band = c.number("moment_ratio_band", 1.5);
    checks.add(result, "as_moment", m.ratio <= band && m.ratio >= 1.0 / band,
               "E[C^2] " + fmt(m.second_moment_half) + " (" + std::to_string(m.half_paths) +
                   " paths) vs " + fmt(m.second_moment_full) + " (" + std::to_string(m.full_paths) +
                   " paths), band " + fmt(band));
  }
}

// ---- shock-instability

constexpr std::array<std::string_view, 15> kShockKeys{
    "u_minus", "nu", "sigma", "t_min", "t_max", "time_count", "quad_nodes", "paths", "seed",
    "limit_fraction", "sup_samples", "sup_tolerance", "sup_range", "checks", "limit_time"};

void run_shock(const RunConfig& rc, const Config& c, RunResult& result, std::ostream& log) {
  c.expect_keys(kShockKeys);
  CheckSet checks(c, {"monotone", "limit", "monte_carlo", "closed_form"},
                  {"monotone", "limit", "monte_carlo", "closed_form"});
  const ShockProfileParams p = guarded([&] { return ShockProfileParams(c.number("u_minus", 1.0), c.number("nu", 0.1)); });
  const double sigma = c.number("sigma", 1.0);
  const double t_min = c.number("t_min", 1e-2), t_max = c.number("t_max", 1e4);
  const std::size_t count = positive_count(c, "time_count", 50);
  if (!(t_min > 0.0 && t_max > t_min) || count < 2) {
    throw ConfigError("need 0 < t_min < t_max and time_count >= 2");
  }
  std::vector<double> times(count);
  for (std::size_t k = 0; k < count; ++k) {
    times[k] = t_min * std::pow(t_max / t_min, static_cast<double>(k) / static_cast<double>(count - 1));
  }
  times.back() = t_max;
  const std::size_t paths = positive_count(c, "paths", 10000);
  const std::uint64_t seed = seed_value(c);
  log << "shock-instability: " << count << " times, " << paths << " Monte Carlo paths\n";

  const ShockQuadrature quad = guarded([&] {
    return shock_instability_quadrature(p, sigma, times, positive_count(c, "quad_nodes", 256));
  });
  const ShockMonteCarlo mc = guarded([&] { return shock_instability_monte_carlo(p, sigma, times, paths, seed); });
  const Output out{rc, result};
  out.csv(".csv", {{"t", "d_quadrature", "d_mc", "stderr"}, {times, quad.d.values(), mc.mean, mc.std_error}});
  out.svg(".svg", "shock displacement d(t)",
          {{"quadrature", times, quad.d.values()}, {"Monte Carlo", times, mc.mean}}, true, false);

  const auto& d = quad.d.values();
  const double limit_state = p.u_minus() - p.u_plus();
  if (checks.enabled("monotone")) {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < d.size(); ++k) worst = std::max(worst, d[k] - d[k + 1]);
    checks.add(result, "monotone", worst <= 1e-8 && d.back() <= limit_state + 1e-8,
               "largest decrease " + fmt(worst) + ", final d " + fmt(d.back()) + ", limit state " +
                   fmt(limit_state) + ", tail mass " + fmt(quad.tail_mass));
  }
  if (checks.enabled("limit")) {
    const double fraction = c.number("limit_fraction", 0.99);
    const double at = c.number("limit_time", t_max);
    const auto it = std::lower_bound(times.begin(), times.end(), at * (1.0 - 1e-12));
    if (it == times.end()) throw ConfigError("limit_time beyond t_max");
    const double value = d[static_cast<std::size_t>(it - times.begin())];
    checks.add(result, "limit", value >= fraction * limit_state,
               "d(" + fmt(*it) + ") = " + fmt(value) + ", needs >= " + fmt(fraction * limit_state));
  }
  if (checks.enabled("monte_carlo")) {
    std::size_t bad = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double diff = std::abs(mc.mean[k] - d[k]);
      const double tol = 3.0 * mc.std_error[k] + 1e-12;
      worst = std::max(worst, diff / tol);
      if (diff > tol) ++bad;
    }
    checks.add(result, "monte_carlo", bad == 0,
               std::to_string(bad) + " times outside 3 stderr; worst |diff|/(3 stderr) " + fmt(worst));
  }
  if (checks.enabled("closed_form")) {
    const std::size_t samples = positive_count(c, "sup_samples", 20);
    const double range = c.number("sup_range", 5.0), tol = c.number("sup_tolerance", 1e-8);
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> shift(-range, range);
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      const double a = shift(engine);
      worst = std::max(worst, std::abs(shock_shift_gap(p, a) - shock_shift_gap_numeric(p, a)));
    }
    checks.add(result, "closed_form", worst <= tol,
               "max |S - brute force| " + fmt(worst) + " over " + std::to_string(samples) + " shifts");
  }
}

// ---- area-check

constexpr std::array<std::string_view, 23> kAreaKeys{
    "source", "input", "column", "time_column", "alpha", "beta", "gamma", "C0", "C1", "t_star",
    "amplitude", "decay", "t_min", "t_max", "samples", "epsilon", "n_max", "per_rise",
    "expected_exponent", "exponent_tolerance", "fit_window", "checks", "witness_C0"};

void run_area_check(const RunConfig& rc, const Config& c, RunResult& result, std::ostream& log) {
  c.expect_keys(kAreaKeys);
  const bool has_expected = c.contains("expected_exponent");
  CheckSet checks(c, {"premises", "conclusion", "exponent"},
                  has_expected ? std::vector<std::string>{"premises", "conclusion", "exponent"}
                               : std::vector<std::string>{"premises", "conclusion"});
  const std::string source = c.text("source", "power");
  const double alpha = c.number("alpha", 1.0), beta = c.number("beta", 0.0), gamma = c.number("gamma", 0.0);

  SampledFunction f = guarded([&]() -> SampledFunction {
    if (source == "power") {
      const double A = c.number("amplitude", 1.0), k = c.number("decay", 1.0);
      const double t0 = c.number("t_min", 0.0), t1 = c.number("t_max", 1e3);
      const std::size_t n = positive_count(c, "samples", 2000);
      if (n < 2 || !(t1 > t0)) throw ConfigError("power source needs samples >= 2 and t_max > t_min");
      std::vector<double> t(n), v(n);
      for (std::size_t i = 0; i < n; ++i) {
        t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
        v[i] = A * std::pow(1.0 + t[i], -k);
      }
      return SampledFunction(std::move(t), std::move(v));
    }
    if (source == "witness") {
      const AreaWitness w = area_witness(alpha, c.number("epsilon", 0.1), c.number("witness_C0", 1.0),
                                         static_cast<int>(positive_count(c, "n_max", 6)));
      return w.sample(positive_count(c, "per_rise", 200));
    }
    if (source == "csv") {
      const CsvTable t = read_csv(c.text("input"));
      return SampledFunction(t.column(c.text("time_column", "t")), t.column(c.text("column")));
    }
    throw ConfigError("source must be \"power\", \"witness\" or \"csv\"");
  });
  const AreaPremises prem = guarded([&] {
    if (c.contains("C0") || c.contains("C1")) {
      return AreaPremises(c.number("C0"), c.number("C1"), alpha, beta, gamma);
    }
    return fit_area_premises(f, alpha, beta, gamma);
  });
  std::optional<double> t_star;
  if (c.contains("t_star")) t_star = c.number("t_star");
  log << "area-check: " << f.size() << " samples from source " << source << '\n';
  const AreaReport report = area_check(f, prem, t_star);

  const Output out{rc, result};
  std::vector<double> envelope;
  for (double t : f.times()) envelope.push_back(area_envelope(prem, t));
  const SampledFunction naive = area_naive_bound(f, prem.C0(), alpha);
  out.csv(".csv", {{"t", "f", "envelope", "naive_bound"}, {f.times(), f.values(), envelope, naive.values()}});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.csv("-report.csv",
          {{"C0", "C1", "alpha", "beta", "gamma", "t_star", "premise1", "premise2", "conclusion",
            "first_ok_time", "worst_ratio", "min_spacing", "max_spacing"},
           {{prem.C0()}, {prem.C1()}, {alpha}, {beta}, {gamma}, {report.t_star},
            {report.premise1_ok ? 1.0 : 0.0}, {report.premise2_ok ? 1.0 : 0.0},
            {report.conclusion_ok ? (*report.conclusion_ok ? 1.0 : 0.0) : nan},
            {report.first_ok_time.value_or(nan)}, {report.worst_conclusion_ratio},
            {report.min_spacing}, {report.max_spacing}}});
  out.svg(".svg", "area inequality", {{"f", f.times(), f.values()}, {"envelope", f.times(), envelope}},
          false, true);

  checks.add(result, "premises", report.premise1_ok && report.premise2_ok,
             "derivative premise " + std::string(report.premise1_ok ? "holds" : "fails") +
                 ", area premise " + (report.premise2_ok ? "holds" : "fails") + " (C0 " +
                 fmt(prem.C0()) + ", C1 " + fmt(prem.C1()) + ")");
  checks.add(result, "conclusion", report.conclusion_ok.value_or(false),
             report.conclusion_ok ? "worst f/envelope " + fmt(report.worst_conclusion_ratio) +
                                        " for t >= " + fmt(report.t_star)
                                  : std::string("not applicable: a premise fails"));
  if (checks.enabled("exponent")) {
    const double expected = c.number("expected_exponent");
    const double tol = c.number("exponent_tolerance", 0.1);
    const auto window = window_of(c, "fit_window", {report.t_star, f.times().back()});
    const RateFit fit = guarded([&] { return rate_fit(f, window); });
    // one-sided: decay at least as fast as the envelope, within tolerance
    checks.add(result, "exponent", fit.exponent <= expected + tol,
               "fitted exponent " + fmt(fit.exponent) + ", envelope exponent " + fmt(expected) +
                   ", tolerance " + fmt(tol));
  }
}

// ---- area-witness

constexpr std::array<std::string_view, 8> kWitnessKeys{
    "alpha", "epsilon", "C0", "n_max", "per_rise", "corrected_shift", "max_area_ratio", "checks"};

void run_area_witness(const RunConfig& rc, const Config& c, RunResult& result, std::ostream& log) {
  c.expect_keys(kWitnessKeys);
  CheckSet checks(c, {"premises", "integral_converges", "literal_growth", "corrected_growth"},
                  {"premises", "integral_converges", "literal_growth", "corrected_growth"});
  const double alpha = c.number("alpha", 1.0), eps = c.number("epsilon", 0.1);
  const AreaWitness w = guarded([&] {
    return area_witness(alpha, eps, c.number("C0", 1.0), static_cast<int>(positive_count(c, "n_max", 6)));
  });
  const double shift = c.number("corrected_shift", 2.0 * eps);
  log << "area-witness: " << w.peaks().size() << " peaks\n";
  const SampledFunction g = w.sample(positive_count(c, "per_rise", 200));

  const Output out{rc, result};
  out.csv(".csv", {{"t", "g"}, {g.times(), g.values()}});
  CsvTable peaks{{"n", "s_n", "t_n", "z_n", "g_t_n", "rise_area", "descent_area", "partial_integral",
                  "literal_product", "corrected_product"},
                 std::vector<std::vector<double>>(10)};
  double partial = 0.0;
  std::vector<double> areas, literal, corrected;
  for (const auto& p : w.peaks()) {
    partial += p.rise_area + p.descent_area;
    areas.push_back(p.rise_area + p.descent_area);
    literal.push_back(p.peak * std::pow(p.t, 0.5 * alpha));
    corrected.push_back(p.peak * std::pow(p.t, 0.5 * alpha + shift));
    const std::array<double, 10> row{static_cast<double>(p.n), p.s, p.t, p.z, p.peak, p.rise_area,
                                     p.descent_area, partial, literal.back(), corrected.back()};
    for (std::size_t j = 0; j < row.size(); ++j) peaks.columns[j].push_back(row[j]);
  }
  out.csv("-peaks.csv", peaks);
  out.svg(".svg", "optimality witness", {{"g", g.times(), g.values()}}, true, true);

  if (checks.enabled("premises")) {
    const AreaPremises prem(w.C0(), w.integral() * (1.0 + 1e-9), alpha, 0.0, 0.0);
    const AreaReport r = area_check(g, prem);
    checks.add(result, "premises", r.premise1_ok && r.premise2_ok,
               "derivative premise " + std::string(r.premise1_ok ? "holds" : "fails") +
                   ", area premise " + (r.premise2_ok ? "holds" : "fails") + " with C1 = " +
                   fmt(prem.C1()));
  }
  if (checks.enabled("integral_converges")) {
    const double max_ratio = c.number("max_area_ratio", 0.95);
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < areas.size(); ++k) worst = std::max(worst, areas[k + 1] / areas[k]);
    checks.add(result, "integral_converges", worst <= max_ratio,
               "per-peak area ratios <= " + fmt(worst) + " (limit " + fmt(max_ratio) +
                   "), partial integral " + fmt(partial));
  }
  auto increasing = [](const std::vector<double>& v) {
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
      if (!(v[k + 1] > v[k])) return false;
    }
    return true;
  };
  auto listing = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + fmt(x);
    return s;
  };
  checks.add(result, "literal_growth", increasing(literal),
             "g(t_n) t_n^(alpha/2) = " + listing(literal));
  checks.add(result, "corrected_growth", increasing(corrected),
             "g(t_n) t_n^(alpha/2+" + fmt(shift) + ") = " + listing(corrected));
}

// ---- oracle-compare

constexpr std::array<std::string_view, 13> kOracleKeys{
    "initial", "nu", "u_minus", "u_plus", "T", "nodes", "half_width", "dt", "interior_fraction",
    "tolerance", "min_ratio", "checks", "dt_factor"};

struct OracleRun {
  Field u;
  std::vector<double> reference;
  double gap;
};

void run_oracle(const RunConfig& rc, const Config& c, RunResult& result, std::ostream& log) {
  c.expect_keys(kOracleKeys);
  const std::string initial = c.text("initial", "arctan");
  const bool shock = initial == "shock";
  if (!shock && initial != "arctan") throw ConfigError("initial must be \"arctan\" or \"shock\"");
  CheckSet checks(c, {"gap", "ratio"}, shock ? std::vector<std::string>{"gap"}
                                             : std::vector<std::string>{"gap", "ratio"});
  const double nu = c.number("nu", shock ? 0.1 : 0.05);
  const double T = c.number("T", 1.0);
  const std::size_t nodes = positive_count(c, "nodes", shock ? 4096 : 8192);
  const double half = c.number("half_width", 21.0);
  const double fraction = c.number("interior_fraction", shock ? 1.0 : 0.5);
  const double tolerance = c.number("tolerance", shock ? 1e-2 : 5e-3);
  const double dt_fixed = c.number("dt", 0.0);
  const double dt_factor = c.number("dt_factor", 1.0);
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("interior_fraction must lie in (0, 1]");
  if (!(dt_factor > 0.0 && dt_factor <= 1.0)) throw ConfigError("dt_factor must lie in (0, 1]");

  auto solve = [&](std::size_t n, double dt_override) {
    return guarded([&] {
      const Grid grid = Grid::symmetric(half, n);
      std::function<double(double)> exact;
      InitialData data = constant_initial_data(0.0);
      double speed = 0.0;
      if (shock) {
        const ShockProfileParams p(c.number("u_minus", 1.0), nu);
        exact = [p](double x) { return viscous_shock(p, x); };
        speed = p.u_minus();
      } else {
        const RiemannData r(c.number("u_minus", -1.0), c.number("u_plus", 1.0));
        data = arctan_initial_data(r);
        speed = r.max_speed();
      }
      const Field u0 = shock ? Field::sample(grid, exact) : Field::sample(grid, data.value);
      const double dt = dt_override > 0.0 ? dt_override : dt_factor * stable_time_step(grid, speed);
      OracleRun run{fd_viscous_solve(u0, ViscousParams(nu), T, dt), {}, 0.0};
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        const double ref = shock ? exact(x) : cole_hopf_solve(data, nu, T, x);
        run.reference.push_back(ref);
        if (std::abs(x) <= fraction * half * (1.0 + 1e-12)) run.gap = std::max(run.gap, std::abs(run.u[i] - ref));
      }
      return run;
    });
  };
  log << "oracle-compare: " << initial << " data, " << nodes << " nodes\n";
  const OracleRun fine = solve(nodes, dt_fixed);

  const Output out{rc, result};
  const Grid grid = fine.u.grid();
  std::vector<double> x(grid.size()), u(fine.u.values().begin(), fine.u.values().end()), gap(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    x[i] = grid.x(i);
    gap[i] = std::abs(u[i] - fine.reference[i]);
  }
  out.csv(".csv", {{"x", "u_fd", "u_ref", "abs_gap"}, {x, u, fine.reference, gap}});
  out.svg(".svg", "finite differences vs reference", {{"u_fd", x, u}, {"u_ref", x, fine.reference}}, false, false);

  checks.add(result, "gap", fine.gap <= tolerance,
             "max |u_fd - u_ref| on |x| <= " + fmt(fraction * half) + ": " + fmt(fine.gap) +
                 ", tolerance " + fmt(tolerance));
  if (checks.enabled("ratio")) {
    const OracleRun coarse = solve(nodes / 2, dt_fixed > 0.0 ? 2.0 * dt_fixed : 0.0);
    const double ratio = coarse.gap / fine.gap;
    const double min_ratio = c.number("min_ratio", 1.8);
    checks.add(result, "ratio", ratio >= min_ratio,
               "gap " + fmt(coarse.gap) + " at " + std::to_string(nodes / 2) + " nodes, " +
                   fmt(fine.gap) + " at " + std::to_string(nodes) + ", ratio " + fmt(ratio) +
                   ", needs >= " + fmt(min_ratio));
  }
}

// ---- simulate

constexpr std::array<std::string_view, 16> kSimulateKeys{
    "initial", "u_minus", "u_plus", "amplitude", "mu", "sigma", "nodes", "half_width", "T", "dt",
    "seed", "scheme", "record_times", "track_far_field", "checks", "paths"};

void run_simulate(const RunConfig& rc, const Config& c, RunResult& result, std::ostream& log) {
  c.expect_keys(kSimulateKeys);
  CheckSet checks(c, {"finite"}, {"finite"});
  const std::string initial = c.text("initial", "rarefaction");
  const bool shock = initial == "shock";
  if (!shock && initial != "rarefaction") throw ConfigError("initial must be \"rarefaction\" or \"shock\"");
  if (c.contains("paths") && c.integer("paths") != 1) throw ConfigError("simulate runs a single path");

  const double T = c.number("T", 10.0);
  auto [u0, riemann, settings] = guarded([&] {
    const NoiseParams noise(c.number("mu", 0.2), c.number("sigma", 0.3));
    const double um = c.number("u_minus", shock ? 1.0 : -1.0);
    const RiemannData r(um, c.number("u_plus", -um));
    if (shock && r.u_plus() != -um) throw ConfigError("shock data needs u_plus = -u_minus");
    const Grid grid = Grid::symmetric(c.number("half_width", default_half_width(r, T)),
                                      positive_count(c, "nodes", 2048));
    Field start(grid, 0.0);
    PathSettings s;
    if (shock) {
      const ShockProfileParams p(um, noise.effective_viscosity());
      start = Field::sample(grid, [&](double x) { return viscous_shock(p, x); });
    } else {
      EnsembleConfig e;
      e.riemann = r;
      e.grid = grid;
      if (c.contains("amplitude")) e.perturbation_amplitude = c.number("amplitude");
      start = perturbed_initial_data(e);
      if (c.flag("track_far_field", true)) s.boundary = rarefaction_far_field(r, grid);
    }
    s.scheme = parse_scheme(c.text("scheme", "euler_maruyama"));
    s.T = T;
    s.seed = seed_value(c);
    s.record_times = c.numbers("record_times", T > 0.0 ? std::vector<double>{0.0, T} : std::vector<double>{0.0});
    const double speed = std::max(start.max_abs(), r.max_speed());
    s.dt = c.number("dt", admissible_time_step(grid, speed, noise, s.scheme));
    return std::tuple{start, r, s};
  });
  const NoiseParams noise(c.number("mu", 0.2), c.number("sigma", 0.3));
  log << "simulate: " << to_string(settings.scheme) << ", " << u0.size() << " nodes, dt = " << settings.dt << '\n';
  const auto snaps = guarded([&] { return simulate_path(u0, noise, riemann, settings); });

  const Output out{rc, result};
  CsvTable fields;
  fields.header.push_back("x");
  std::vector<double> x;
  for (std::size_t i = 0; i < u0.size(); ++i) x.push_back(u0.grid().x(i));
  fields.columns.push_back(x);
  CsvTable times{{"index", "requested", "t"}, std::vector<std::vector<double>>(3)};
  std::vector<SvgSeries> plot;
  bool finite = true;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    fields.header.push_back("u_" + std::to_string(k));
    fields.columns.emplace_back(snaps[k].field.values().begin(), snaps[k].field.values().end());
    times.columns[0].push_back(static_cast<double>(k));
    times.columns[1].push_back(snaps[k].requested_time);
    times.columns[2].push_back(snaps[k].time);
    plot.push_back({"t = " + fmt(snaps[k].time), x, fields.columns.back()});
    finite = finite && snaps[k].field.all_finite();
  }
  out.csv(".csv", fields);
  out.csv("-times.csv", times);
  out.svg(".svg", "sample path", plot, false, false);
  checks.add(result, "finite", finite, std::to_string(snaps.size()) + " snapshots recorded");
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg, std::ostream& log) {
  Config params = cfg.params;
  if (cfg.seed) params.set("seed", static_cast<double>(*cfg.seed));
  if (cfg.paths) params.set("paths", static_cast<double>(*cfg.paths));
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.output_dir.string());

  RunResult result;
  switch (cfg.experiment) {
    case Experiment::rarefaction_stability: run_rarefaction(cfg, params, result, log); break;
    case Experiment::shock_instability: run_shock(cfg, params, result, log); break;
    case Experiment::area_check: run_area_check(cfg, params, result, log); break;
    case Experiment::area_witness: run_area_witness(cfg, params, result, log); break;
    case Experiment::oracle_compare: run_oracle(cfg, params, result, log); break;
    case Experiment::simulate: run_simulate(cfg, params, result, log); break;
  }
  const auto effective = cfg.output_dir / (std::string(to_string(cfg.experiment)) + "-effective.cfg");
  std::ofstream(effective) << params.emit();
  result.files.push_back(effective);
  return result;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical experiments for the stochastic Burgers equation with transport noise",
               "wavelab"};
  std::string experiment, config_file, output = ".";
  std::optional<std::uint64_t> seed, paths;
  bool svg = false;
  std::string names;
  for (Experiment e : all_experiments()) names += (names.empty() ? "" : ", ") + std::string(to_string(e));
  app.add_option("experiment", experiment, "one of: " + names)->required();
  app.add_option("--config", config_file, "flat key = value config file")->required();
  app.add_option("--output", output, "output directory (default: current directory)");
  app.add_option("--seed", seed, "base seed override");
  app.add_option("--paths", paths, "path count override");
  app.add_flag("--svg", svg, "also write SVG plots");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    cfg.experiment = parse_experiment(experiment);
    cfg.params = Config::load(config_file);
    cfg.output_dir = output;
    cfg.emit_svg = svg;
    cfg.seed = seed;
    cfg.paths = paths;
    const RunResult result = run_experiment(cfg, err);
    for (const auto& c : result.checks) {
      out << (c.passed ? "PASS\t" : "FAIL\t") << c.name << '\t' << c.detail << '\n';
    }
    if (!result.ok()) {
      out << result.failure_list();
      return 1;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "ERROR\tconfig\t" << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "ERROR\trun\t" << e.what() << '\n';
    return 3;
  }
}

}  // namespace wavelab
