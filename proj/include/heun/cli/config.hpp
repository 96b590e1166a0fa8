#ifndef HEUN_CLI_CONFIG_HPP
#define HEUN_CLI_CONFIG_HPP

// Run configuration for the heun command-line tool: one block per subcommand
// plus the shared settings, with a key-value file form and a JSON echo.

#include "heun/errors.hpp"
#include "heun/scalar.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace heun::cli {

/// Bad flags, bad config files, inconsistent inputs. Maps to exit status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class Command { verify, bethe, ml, sweep };
enum class OutputFormat { json, csv };
enum class Precision { exact, floating };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::verify: return "verify";
    case Command::bethe: return "bethe";
    case Command::ml: return "ml";
    case Command::sweep: return "sweep";
  }
  return "?";
}

inline const char* to_string(OutputFormat f) { return f == OutputFormat::json ? "json" : "csv"; }
inline const char* to_string(Precision p) { return p == Precision::exact ? "exact" : "float"; }

inline Command command_from_string(const std::string& s) {
  if (s == "verify") return Command::verify;
  if (s == "bethe") return Command::bethe;
  if (s == "ml") return Command::ml;
  if (s == "sweep") return Command::sweep;
  throw UsageError("unknown command '" + s + "'");
}

inline OutputFormat format_from_string(const std::string& s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  throw UsageError("format must be json or csv, got '" + s + "'");
}

inline Precision precision_from_string(const std::string& s) {
  if (s == "exact") return Precision::exact;
  if (s == "float") return Precision::floating;
  throw UsageError("precision must be exact or float, got '" + s + "'");
}

struct CommonConfig {
  std::uint64_t seed = 1;
  OutputFormat format = OutputFormat::json;
  std::string out;                      ///< empty: standard output
  std::optional<Precision> precision;   ///< unset: the command's default
  bool timing = false;                  ///< record wall time (makes output non-reproducible)

  friend bool operator==(const CommonConfig&, const CommonConfig&) = default;
};

struct VerifyConfig {
  int instances = 200;       ///< route-equivalence instances
  int aux_instances = 100;   ///< instances for each of the other suites
  std::array<int, 2> k_range{3, 8};
  std::array<int, 2> n_range{0, 6};
  double tolerance = 1e-8;   ///< float mode only
  std::string inject_fault = "none";

  friend bool operator==(const VerifyConfig&, const VerifyConfig&) = default;
};

struct BetheConfig {
  int k = 2;
  std::vector<std::string> coeff_x;  ///< a_k, ..., a_0
  std::vector<std::string> coeff_y;  ///< b_{k-1}, ..., b_0
  int n = 0;
  int starts = 64;
  std::pair<double, double> interval{-1.0, 1.0};
  double tol = 1e-11;
  int max_iterations = 200;

  friend bool operator==(const BetheConfig&, const BetheConfig&) = default;
};

struct MLConfig {
  double lambda = 1.0;
  double a = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  int p = 0;
  int n = 0;
  std::tuple<double, double, int> grid{0.1, 2.5, 50};
  double residual_tol = 1e-6;

  friend bool operator==(const MLConfig&, const MLConfig&) = default;
};

struct SweepConfig {
  MLConfig base;
  std::string var = "b1";
  std::pair<double, double> range{0.0, 2.0};
  double step = 0.25;

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct RunConfig {
  Command command = Command::verify;
  CommonConfig common;
  VerifyConfig verify;
  BetheConfig bethe;
  MLConfig ml;
  SweepConfig sweep;

  Precision precision() const {
    if (common.precision) return *common.precision;
    return command == Command::verify ? Precision::exact : Precision::floating;
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline const std::set<std::string>& sweep_variables() {
  static const std::set<std::string> vars{"lambda", "a", "b1", "b2"};
  return vars;
}

/// Checks that do not depend on where the values came from.
inline void validate(const RunConfig& cfg) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw UsageError(what);
  };
  switch (cfg.command) {
    case Command::verify: {
      const auto& v = cfg.verify;
      need(v.instances >= 0 && v.aux_instances >= 0, "verify: instance counts must be non-negative");
      need(v.k_range[0] >= 2 && v.k_range[0] <= v.k_range[1], "verify: k-range must satisfy 2 <= lo <= hi");
      need(v.n_range[0] >= 0 && v.n_range[0] <= v.n_range[1], "verify: n-range must satisfy 0 <= lo <= hi");
      need(v.tolerance > 0, "verify: tolerance must be positive");
      need(v.inject_fault == "none" || v.inject_fault == "closed_form", "verify: inject-fault must be none or closed_form");
      break;
    }
    case Command::bethe: {
      const auto& b = cfg.bethe;
      need(cfg.precision() == Precision::floating, "bethe: the root solver works in floating point only; drop --exact");
      need(b.k >= 2, "bethe: --k must be at least 2");
      need(!b.coeff_x.empty(), "bethe: --coeff-x is required");
      need(!b.coeff_y.empty(), "bethe: --coeff-y is required");
      need(static_cast<int>(b.coeff_x.size()) == b.k + 1,
           "bethe: --coeff-x takes k + 1 = " + std::to_string(b.k + 1) + " values, got " + std::to_string(b.coeff_x.size()));
      need(static_cast<int>(b.coeff_y.size()) == b.k,
           "bethe: --coeff-y takes k = " + std::to_string(b.k) + " values, got " + std::to_string(b.coeff_y.size()));
      need(b.n >= 1, "bethe: --n must be at least 1");
      need(b.starts >= 1, "bethe: --starts must be at least 1");
      need(b.interval.first < b.interval.second, "bethe: --interval must satisfy lo < hi");
      need(b.tol > 0, "bethe: --tol must be positive");
      need(b.max_iterations >= 1, "bethe: --max-iterations must be at least 1");
      break;
    }
    case Command::ml:
    case Command::sweep: {
      const char* name = to_string(cfg.command);
      const auto& m = cfg.command == Command::ml ? cfg.ml : cfg.sweep.base;
      need(cfg.precision() == Precision::floating, std::string(name) + ": the oscillator runs in floating point only; drop --exact");
      need(m.p == 0 || m.p == 1, std::string(name) + ": --p must be 0 or 1");
      need(m.n == 0 || m.n == 1, std::string(name) + ": --n must be 0 or 1");
      need(std::get<2>(m.grid) >= 1, std::string(name) + ": grid count must be at least 1");
      need(std::get<0>(m.grid) <= std::get<1>(m.grid), std::string(name) + ": grid must satisfy lo <= hi");
      need(m.residual_tol > 0, std::string(name) + ": --residual-tol must be positive");
      if (cfg.command == Command::ml) {
        need(m.lambda != 0.0, "ml: --lambda must be nonzero");
      } else {
        need(sweep_variables().count(cfg.sweep.var) == 1, "sweep: --var must be one of lambda, a, b1, b2");
        need(cfg.sweep.step > 0, "sweep: --step must be positive");
      }
      break;
    }
  }
}

// ---------------------------------------------------------------------------
// key-value file form

/// Every key accepted in a config file, by section ("" is the top level).
inline const std::map<std::string, std::set<std::string>>& config_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"seed", "format", "out", "precision", "timing"}},
      {"verify", {"instances", "aux-instances", "k-range", "n-range", "tolerance", "inject-fault"}},
      {"bethe", {"k", "coeff-x", "coeff-y", "n", "starts", "interval", "tol", "max-iterations"}},
      {"ml", {"lambda", "a", "b1", "b2", "p", "n", "grid", "residual-tol"}},
      {"sweep", {"lambda", "a", "b1", "b2", "p", "n", "grid", "residual-tol", "var", "range", "step"}},
  };
  return keys;
}

struct ConfigKeyLocation {
  std::string section;
  std::string key;
  int line = 0;
};

/// Scans a config file for sections and keys, rejecting anything unknown with its
/// line number. Values are left to the option parser.
inline std::vector<ConfigKeyLocation> scan_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  const auto& keys = config_keys();
  std::vector<ConfigKeyLocation> found;
  std::string section;
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const std::string where = path + ":" + std::to_string(number) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') throw UsageError(where + "malformed section header '" + t + "'");
      section = trim(t.substr(1, t.size() - 2));
      if (keys.count(section) == 0 || section.empty()) throw UsageError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(where + "expected 'key = value', got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    if (keys.at(section).count(key) == 0) {
      throw UsageError(where + "unknown field '" + key + "'" + (section.empty() ? std::string(" at top level") : " in [" + section + "]"));
    }
    found.push_back({section, key, number});
  }
  return found;
}

namespace detail {

inline std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string real(double v) { return format_double(v); }

inline void write_ml_keys(std::ostringstream& os, const MLConfig& m) {
  os << "lambda = " << real(m.lambda) << "\n"
     << "a = " << real(m.a) << "\n"
     << "b1 = " << real(m.b1) << "\n"
     << "b2 = " << real(m.b2) << "\n"
     << "p = " << m.p << "\n"
     << "n = " << m.n << "\n"
     << "grid = [" << real(std::get<0>(m.grid)) << ", " << real(std::get<1>(m.grid)) << ", " << std::get<2>(m.grid) << "]\n"
     << "residual-tol = " << real(m.residual_tol) << "\n";
}

inline std::string string_list(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + quoted(v[i]);
  return out + "]";
}

}  // namespace detail

/// The whole configuration as a config file. Reading it back with the same
/// command reproduces `cfg` exactly.
inline std::string write_config(const RunConfig& cfg) {
  std::ostringstream os;
  const auto& c = cfg.common;
  os << "# heun " << to_string(cfg.command) << "\n"
     << "seed = " << c.seed << "\n"
     << "format = " << detail::quoted(to_string(c.format)) << "\n";
  if (!c.out.empty()) os << "out = " << detail::quoted(c.out) << "\n";
  if (c.precision) os << "precision = " << detail::quoted(to_string(*c.precision)) << "\n";
  os << "timing = " << (c.timing ? "true" : "false") << "\n";

  const auto& v = cfg.verify;
  os << "\n[verify]\n"
     << "instances = " << v.instances << "\n"
     << "aux-instances = " << v.aux_instances << "\n"
     << "k-range = [" << v.k_range[0] << ", " << v.k_range[1] << "]\n"
     << "n-range = [" << v.n_range[0] << ", " << v.n_range[1] << "]\n"
     << "tolerance = " << detail::real(v.tolerance) << "\n"
     << "inject-fault = " << detail::quoted(v.inject_fault) << "\n";

  const auto& b = cfg.bethe;
  os << "\n[bethe]\n"
     << "k = " << b.k << "\n";
  if (!b.coeff_x.empty()) os << "coeff-x = " << detail::string_list(b.coeff_x) << "\n";
  if (!b.coeff_y.empty()) os << "coeff-y = " << detail::string_list(b.coeff_y) << "\n";
  os << "n = " << b.n << "\n"
     << "starts = " << b.starts << "\n"
     << "interval = [" << detail::real(b.interval.first) << ", " << detail::real(b.interval.second) << "]\n"
     << "tol = " << detail::real(b.tol) << "\n"
     << "max-iterations = " << b.max_iterations << "\n";

  os << "\n[ml]\n";
  detail::write_ml_keys(os, cfg.ml);

  os << "\n[sweep]\n";
  detail::write_ml_keys(os, cfg.sweep.base);
  os << "var = " << detail::quoted(cfg.sweep.var) << "\n"
     << "range = [" << detail::real(cfg.sweep.range.first) << ", " << detail::real(cfg.sweep.range.second) << "]\n"
     << "step = " << detail::real(cfg.sweep.step) << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// JSON echo: shared settings plus the active command's block

inline nlohmann::json ml_to_json(const MLConfig& m) {
  return {{"lambda", m.lambda}, {"a", m.a},   {"b1", m.b1},
          {"b2", m.b2},         {"p", m.p},   {"n", m.n},
          {"grid", {std::get<0>(m.grid), std::get<1>(m.grid), std::get<2>(m.grid)}},
          {"residual_tol", m.residual_tol}};
}

inline MLConfig ml_from_json(const nlohmann::json& j) {
  MLConfig m;
  m.lambda = j.at("lambda").get<double>();
  m.a = j.at("a").get<double>();
  m.b1 = j.at("b1").get<double>();
  m.b2 = j.at("b2").get<double>();
  m.p = j.at("p").get<int>();
  m.n = j.at("n").get<int>();
  const auto& g = j.at("grid");
  m.grid = {g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<int>()};
  m.residual_tol = j.at("residual_tol").get<double>();
  return m;
}

inline nlohmann::json to_json(const RunConfig& cfg) {
  const auto& c = cfg.common;
  nlohmann::json j{{"command", to_string(cfg.command)},
                   {"seed", c.seed},
                   {"format", to_string(c.format)},
                   {"precision", to_string(cfg.precision())},
                   {"precision_explicit", c.precision.has_value()},
                   {"timing", c.timing}};
  // the output path is left out so that runs differing only in --out echo identically
  switch (cfg.command) {
    case Command::verify: {
      const auto& v = cfg.verify;
      j["verify"] = {{"instances", v.instances},
                     {"aux_instances", v.aux_instances},
                     {"k_range", v.k_range},
                     {"n_range", v.n_range},
                     {"tolerance", v.tolerance},
                     {"inject_fault", v.inject_fault}};
      break;
    }
    case Command::bethe: {
      const auto& b = cfg.bethe;
      j["bethe"] = {{"k", b.k},
                    {"coeff_x", b.coeff_x},
                    {"coeff_y", b.coeff_y},
                    {"n", b.n},
                    {"starts", b.starts},
                    {"interval", {b.interval.first, b.interval.second}},
                    {"tol", b.tol},
                    {"max_iterations", b.max_iterations}};
      break;
    }
    case Command::ml: j["ml"] = ml_to_json(cfg.ml); break;
    case Command::sweep: {
      auto s = ml_to_json(cfg.sweep.base);
      s["var"] = cfg.sweep.var;
      s["range"] = {cfg.sweep.range.first, cfg.sweep.range.second};
      s["step"] = cfg.sweep.step;
      j["sweep"] = s;
      break;
    }
  }
  return j;
}

/// Inverse of to_json; blocks of inactive commands and the output path come back as defaults.
inline RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.command = command_from_string(j.at("command").get<std::string>());
  cfg.common.seed = j.at("seed").get<std::uint64_t>();
  cfg.common.format = format_from_string(j.at("format").get<std::string>());
  if (j.at("precision_explicit").get<bool>()) cfg.common.precision = precision_from_string(j.at("precision").get<std::string>());
  cfg.common.timing = j.at("timing").get<bool>();
  switch (cfg.command) {
    case Command::verify: {
      const auto& v = j.at("verify");
      cfg.verify.instances = v.at("instances").get<int>();
      cfg.verify.aux_instances = v.at("aux_instances").get<int>();
      cfg.verify.k_range = v.at("k_range").get<std::array<int, 2>>();
      cfg.verify.n_range = v.at("n_range").get<std::array<int, 2>>();
      cfg.verify.tolerance = v.at("tolerance").get<double>();
      cfg.verify.inject_fault = v.at("inject_fault").get<std::string>();
      break;
    }
    case Command::bethe: {
      const auto& b = j.at("bethe");
      cfg.bethe.k = b.at("k").get<int>();
      cfg.bethe.coeff_x = b.at("coeff_x").get<std::vector<std::string>>();
      cfg.bethe.coeff_y = b.at("coeff_y").get<std::vector<std::string>>();
      cfg.bethe.n = b.at("n").get<int>();
      cfg.bethe.starts = b.at("starts").get<int>();
      cfg.bethe.interval = {b.at("interval").at(0).get<double>(), b.at("interval").at(1).get<double>()};
      cfg.bethe.tol = b.at("tol").get<double>();
      cfg.bethe.max_iterations = b.at("max_iterations").get<int>();
      break;
    }
    case Command::ml: cfg.ml = ml_from_json(j.at("ml")); break;
    case Command::sweep: {
      const auto& s = j.at("sweep");
      cfg.sweep.base = ml_from_json(s);
      cfg.sweep.var = s.at("var").get<std::string>();
      cfg.sweep.range = {s.at("range").at(0).get<double>(), s.at("range").at(1).get<double>()};
      cfg.sweep.step = s.at("step").get<double>();
      break;
    }
  }
  return cfg;
}

}  // namespace heun::cli

#endif  // HEUN_CLI_CONFIG_HPP
