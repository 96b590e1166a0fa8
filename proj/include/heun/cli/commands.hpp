#ifndef HEUN_CLI_COMMANDS_HPP
#define HEUN_CLI_COMMANDS_HPP

// The four subcommands as functions from a validated RunConfig to a Report.

#include "heun/cli/config.hpp"
#include "heun/cli/report.hpp"
#include "heun/fba.hpp"
#include "heun/mlosc.hpp"
#include "heun/verify.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace heun::cli {

namespace detail {

template <class T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
std::optional<T> opt_get(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

inline std::string cell(double v) { return format_double(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(bool v) { return v ? "true" : "false"; }
template <class T>
std::string cell(const std::optional<T>& v) {
  return v ? cell(*v) : std::string{};
}

inline std::string joined(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + format_double(v[i]);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// typed result records

struct SuiteRecord {
  std::string suite;
  int instances = 0;
  int passed = 0;
  bool ok = true;
  nlohmann::json counterexample;

  friend bool operator==(const SuiteRecord&, const SuiteRecord&) = default;
};

inline nlohmann::json to_json(const SuiteRecord& r) {
  return {{"suite", r.suite}, {"instances", r.instances}, {"passed", r.passed}, {"ok", r.ok}, {"counterexample", r.counterexample}};
}

inline SuiteRecord suite_record_from_json(const nlohmann::json& j) {
  return {j.at("suite").get<std::string>(), j.at("instances").get<int>(), j.at("passed").get<int>(), j.at("ok").get<bool>(),
          j.at("counterexample")};
}

struct BetheRecord {
  std::vector<double> roots;           ///< ascending
  double bethe_residual = 0.0;         ///< max |BAE residual|
  std::vector<double> z_coefficients;  ///< c_0, ..., c_{k-2}
  double ode_residual = 0.0;           ///< max |coefficient| of X y'' + Y y' + Z y

  friend bool operator==(const BetheRecord&, const BetheRecord&) = default;
};

inline nlohmann::json to_json(const BetheRecord& r) {
  return {{"roots", r.roots}, {"bethe_residual", r.bethe_residual}, {"z_coefficients", r.z_coefficients}, {"ode_residual", r.ode_residual}};
}

inline BetheRecord bethe_record_from_json(const nlohmann::json& j) {
  return {j.at("roots").get<std::vector<double>>(), j.at("bethe_residual").get<double>(),
          j.at("z_coefficients").get<std::vector<double>>(), j.at("ode_residual").get<double>()};
}

struct EigenpairRecord {
  int n = 0;
  int p = 0;
  std::optional<double> root;
  double energy = 0.0;
  double epsilon = 0.0;
  double A = 0.0;
  double B1 = 0.0;
  double B2 = 0.0;
  double B3 = 0.0;
  double B4 = 0.0;
  int node_count = 0;
  bool normalizable = false;
  std::string normalizability_condition;
  std::optional<double> norm;         ///< integral of psi^2 d mu (refined rule)
  std::optional<double> norm_change;  ///< relative change between the two quadrature refinements
  std::optional<std::string> norm_error;
  bool root_in_unit_interval = true;
  std::optional<double> bethe_residual;
  std::optional<double> max_residual;  ///< max |residual / psi| over the usable grid points
  int grid_points = 0;

  friend bool operator==(const EigenpairRecord&, const EigenpairRecord&) = default;
};

inline nlohmann::json to_json(const EigenpairRecord& r) {
  using detail::opt_json;
  return {{"n", r.n},
          {"p", r.p},
          {"root", opt_json(r.root)},
          {"energy", r.energy},
          {"epsilon", r.epsilon},
          {"A", r.A},
          {"B1", r.B1},
          {"B2", r.B2},
          {"B3", r.B3},
          {"B4", r.B4},
          {"node_count", r.node_count},
          {"normalizable", r.normalizable},
          {"normalizability_condition", r.normalizability_condition},
          {"norm", opt_json(r.norm)},
          {"norm_change", opt_json(r.norm_change)},
          {"norm_error", opt_json(r.norm_error)},
          {"root_in_unit_interval", r.root_in_unit_interval},
          {"bethe_residual", opt_json(r.bethe_residual)},
          {"max_residual", opt_json(r.max_residual)},
          {"grid_points", r.grid_points}};
}

inline EigenpairRecord eigenpair_record_from_json(const nlohmann::json& j) {
  using detail::opt_get;
  EigenpairRecord r;
  r.n = j.at("n").get<int>();
  r.p = j.at("p").get<int>();
  r.root = opt_get<double>(j, "root");
  r.energy = j.at("energy").get<double>();
  r.epsilon = j.at("epsilon").get<double>();
  r.A = j.at("A").get<double>();
  r.B1 = j.at("B1").get<double>();
  r.B2 = j.at("B2").get<double>();
  r.B3 = j.at("B3").get<double>();
  r.B4 = j.at("B4").get<double>();
  r.node_count = j.at("node_count").get<int>();
  r.normalizable = j.at("normalizable").get<bool>();
  r.normalizability_condition = j.at("normalizability_condition").get<std::string>();
  r.norm = opt_get<double>(j, "norm");
  r.norm_change = opt_get<double>(j, "norm_change");
  r.norm_error = opt_get<std::string>(j, "norm_error");
  r.root_in_unit_interval = j.at("root_in_unit_interval").get<bool>();
  r.bethe_residual = opt_get<double>(j, "bethe_residual");
  r.max_residual = opt_get<double>(j, "max_residual");
  r.grid_points = j.at("grid_points").get<int>();
  return r;
}

struct SweepRecord {
  double value = 0.0;
  int n = 0;
  std::optional<int> eigenpair;  ///< index among the eigenpairs at this value; null on error
  std::optional<double> energy;
  std::optional<double> root;
  std::optional<double> max_residual;
  std::optional<bool> normalizable;
  std::string error;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

inline nlohmann::json to_json(const SweepRecord& r) {
  using detail::opt_json;
  return {{"value", r.value},
          {"n", r.n},
          {"eigenpair", opt_json(r.eigenpair)},
          {"energy", opt_json(r.energy)},
          {"root", opt_json(r.root)},
          {"max_residual", opt_json(r.max_residual)},
          {"normalizable", opt_json(r.normalizable)},
          {"error", r.error}};
}

inline SweepRecord sweep_record_from_json(const nlohmann::json& j) {
  using detail::opt_get;
  return {j.at("value").get<double>(),       j.at("n").get<int>(),
          opt_get<int>(j, "eigenpair"),       opt_get<double>(j, "energy"),
          opt_get<double>(j, "root"),         opt_get<double>(j, "max_residual"),
          opt_get<bool>(j, "normalizable"),  j.at("error").get<std::string>()};
}

inline const std::vector<std::string>& csv_header(Command c) {
  static const std::map<Command, std::vector<std::string>> headers{
      {Command::verify, {"suite", "instances", "passed", "ok"}},
      {Command::bethe, {"solution", "roots", "bethe_residual", "ode_residual", "z_coefficients"}},
      {Command::ml, {"n", "p", "root", "energy", "A", "B1", "B2", "B3", "B4", "node_count", "normalizable", "norm", "max_residual"}},
      {Command::sweep, {"value", "n", "eigenpair", "energy", "root", "max_residual", "normalizable", "error"}},
  };
  return headers.at(c);
}

// ---------------------------------------------------------------------------
// verify

inline Report cmd_verify(const RunConfig& cfg) {
  const auto& v = cfg.verify;
  VerifyOptions opt;
  opt.instances = v.instances;
  opt.appendix_instances = v.aux_instances;
  opt.symmetric_instances = v.aux_instances;
  opt.construction_instances = v.aux_instances;
  opt.k_min = v.k_range[0];
  opt.k_max = v.k_range[1];
  opt.n_min = v.n_range[0];
  opt.n_max = v.n_range[1];
  opt.seed = cfg.common.seed;
  opt.exact = cfg.precision() == Precision::exact;
  opt.float_tolerance = v.tolerance;
  opt.fault = v.inject_fault == "closed_form" ? Fault::closed_form : Fault::none;

  Report report;
  report.command = "verify";
  report.csv.header = csv_header(Command::verify);
  for (const auto& suite : run_verification(opt)) {
    SuiteRecord rec{suite.suite, suite.instances, suite.passed, suite.ok, suite.counterexample};
    report.results.push_back(to_json(rec));
    report.csv.rows.push_back({rec.suite, detail::cell(rec.instances), detail::cell(rec.passed), detail::cell(rec.ok)});
    if (!rec.ok) report.failures.push_back({{"suite", rec.suite}, {"counterexample", rec.counterexample}});
  }
  return report;
}

// ---------------------------------------------------------------------------
// bethe

inline OdeSystem<double> bethe_system(const BetheConfig& b) {
  auto parse_list = [](const std::vector<std::string>& text, const char* flag) {
    std::vector<double> out;
    for (const auto& t : text) {
      try {
        out.push_back(to_double(parse_rational(t)));
      } catch (const std::invalid_argument&) {
        throw UsageError(std::string("bethe: ") + flag + ": not a number: '" + t + "'");
      }
    }
    return out;
  };
  const auto x = parse_list(b.coeff_x, "--coeff-x");
  const auto y = parse_list(b.coeff_y, "--coeff-y");
  try {
    return OdeSystem<double>(b.k, poly_from_descending<double>(x), poly_from_descending<double>(y));
  } catch (const ShapeError& e) {
    throw UsageError(std::string("bethe: ") + e.what());
  }
}

inline Report cmd_bethe(const RunConfig& cfg) {
  const auto& b = cfg.bethe;
  const auto sys = bethe_system(b);
  SolverConfig solver;
  solver.max_iterations = b.max_iterations;
  solver.newton_tolerance = b.tol;
  solver.multistart_count = b.starts;
  solver.seed = cfg.common.seed;
  solver.interval_lo = b.interval.first;
  solver.interval_hi = b.interval.second;

  const auto search = solve_bethe(sys, b.n, solver);
  Report report;
  report.command = "bethe";
  report.csv.header = csv_header(Command::bethe);

  for (std::size_t i = 0; i < search.solutions.size(); ++i) {
    const auto& sol = search.solutions[i];
    BetheRecord rec;
    rec.roots.assign(sol.roots.begin(), sol.roots.end());
    rec.bethe_residual = sol.residual_norm;
    for (int q = 0; q <= sys.k() - 2; ++q) rec.z_coefficients.push_back(sol.Z.coeff(q));
    rec.ode_residual = ode_residual(sys, sol.Z, poly_from_roots(sol.roots)).max_abs_coeff();
    report.results.push_back(to_json(rec));
    report.csv.rows.push_back({detail::cell(static_cast<int>(i)), detail::joined(rec.roots), detail::cell(rec.bethe_residual),
                               detail::cell(rec.ode_residual), detail::joined(rec.z_coefficients)});
    const double scale = std::max({1.0, sys.X().max_abs_coeff(), sys.Y().max_abs_coeff(), sol.Z.max_abs_coeff()});
    if (rec.ode_residual > 100 * b.tol * scale) {
      report.failures.push_back({{"solution", i}, {"kind", "ode_residual"}, {"ode_residual", rec.ode_residual}});
    }
  }

  std::map<std::string, int> outcomes;
  for (auto o : search.starts) ++outcomes[to_string(o)];
  std::string summary = "starts:";
  for (const auto& [name, count] : outcomes) summary += " " + name + "=" + std::to_string(count);
  report.notes.push_back(summary);
  if (search.solutions.empty()) report.notes.push_back("no solution found");
  return report;
}

// ---------------------------------------------------------------------------
// ml

namespace detail {

struct GridScan {
  std::optional<double> max_residual;
  int used = 0;
};

/// Relative Schroedinger residual over the grid, skipping points outside the
/// coordinate range and points where psi (nearly) vanishes.
inline GridScan scan_grid(const MLParams& prm, const MLEigenpair& pair, const std::tuple<double, double, int>& grid) {
  const auto [lo, hi, count] = grid;
  GridScan out;
  for (int i = 0; i < count; ++i) {
    const double x = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    if (prm.p == 1 && x == 0.0) continue;
    if (pair.n == 1 && std::fabs(1.0 - *pair.root * (1.0 + prm.lambda * x * x)) < 1e-3) continue;
    try {
      const double r = std::fabs(schrodinger_residual(prm, pair, x) / ml_wavefunction(prm, pair, x));
      if (!std::isfinite(r)) continue;
      out.max_residual = std::max(out.max_residual.value_or(0.0), r);
      ++out.used;
    } catch (const DomainViolation&) {
    }
  }
  return out;
}

struct MLOutcome {
  std::vector<EigenpairRecord> pairs;
  std::vector<std::string> notes;
  std::vector<std::string> residual_failures;  ///< one per pair over the threshold
};

inline MLOutcome run_ml(const MLConfig& m) {
  const MLParams prm{m.lambda, m.a, m.b1, m.b2, m.p};
  prm.validate();
  const auto bp = ml_b_params(prm);
  MLOutcome out;

  std::vector<MLEigenpair> pairs;
  if (m.n == 0) {
    pairs.push_back(ml_spectrum_n0(prm));
  } else {
    auto spectrum = ml_spectrum_n1(prm);
    pairs = std::move(spectrum.pairs);
    for (double z : spectrum.degenerate_roots) out.notes.push_back("repeated cubic root " + format_double(z) + " suppressed");
  }

  const double node_range = std::max(std::fabs(std::get<0>(m.grid)), std::fabs(std::get<1>(m.grid)));
  for (const auto& pair : pairs) {
    EigenpairRecord rec;
    rec.n = pair.n;
    rec.p = pair.p;
    rec.root = pair.root;
    rec.energy = pair.energy;
    rec.epsilon = pair.epsilon;
    rec.A = pair.A;
    rec.B1 = pair.B1;
    rec.B2 = bp.B2;
    rec.B3 = bp.B3;
    rec.B4 = bp.B4;
    rec.node_count = node_range > 0 ? ml_node_count(prm, pair, node_range) : 0;
    rec.normalizable = pair.normalizable;
    rec.normalizability_condition = pair.normalizability_condition;
    rec.root_in_unit_interval = pair.root_in_unit_interval;
    rec.bethe_residual = pair.bethe_residual;
    try {
      const double coarse = normalizability_norm(prm, pair, 0);
      const double fine = normalizability_norm(prm, pair, 1);
      rec.norm = fine;
      rec.norm_change = std::fabs(fine - coarse) / std::fabs(fine);
    } catch (const NotNormalizable& e) {
      rec.norm_error = std::string("NotNormalizable: ") + e.what();
    } catch (const std::exception& e) {
      rec.norm_error = e.what();
    }
    const auto scan = scan_grid(prm, pair, m.grid);
    rec.max_residual = scan.max_residual;
    rec.grid_points = scan.used;
    if (scan.used == 0) out.notes.push_back("no usable grid points for the residual scan");
    if (scan.max_residual && *scan.max_residual > m.residual_tol) {
      out.residual_failures.push_back("max relative residual " + format_double(*scan.max_residual) + " exceeds " +
                                      format_double(m.residual_tol));
    }
    if (!pair.root_in_unit_interval) out.notes.push_back("root " + format_double(*pair.root) + " lies outside (0, 1]");
    out.pairs.push_back(std::move(rec));
  }
  return out;
}

}  // namespace detail

inline Report cmd_ml(const RunConfig& cfg) {
  Report report;
  report.command = "ml";
  report.csv.header = csv_header(Command::ml);
  detail::MLOutcome outcome;
  try {
    outcome = detail::run_ml(cfg.ml);
  } catch (const Error& e) {
    report.failures.push_back({{"kind", "error"}, {"message", e.what()}});
    return report;
  }
  for (std::size_t i = 0; i < outcome.pairs.size(); ++i) {
    const auto& rec = outcome.pairs[i];
    report.results.push_back(to_json(rec));
    using detail::cell;
    report.csv.rows.push_back({cell(rec.n), cell(rec.p), cell(rec.root), cell(rec.energy), cell(rec.A), cell(rec.B1),
                               cell(rec.B2), cell(rec.B3), cell(rec.B4), cell(rec.node_count), cell(rec.normalizable),
                               cell(rec.norm), cell(rec.max_residual)});
  }
  for (const auto& f : outcome.residual_failures) report.failures.push_back({{"kind", "residual"}, {"message", f}});
  for (const auto& n : outcome.notes) report.notes.push_back(n);
  return report;
}

// ---------------------------------------------------------------------------
// sweep

/// lo, lo + step, ... up to hi (with a little slack for rounding); empty when hi < lo.
inline std::vector<double> sweep_values(double lo, double hi, double step) {
  std::vector<double> out;
  if (hi < lo) return out;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

inline void set_ml_field(MLConfig& m, const std::string& var, double value) {
  if (var == "lambda") m.lambda = value;
  else if (var == "a") m.a = value;
  else if (var == "b1") m.b1 = value;
  else if (var == "b2") m.b2 = value;
  else throw UsageError("sweep: unknown variable '" + var + "'");
}

inline Report cmd_sweep(const RunConfig& cfg) {
  const auto& s = cfg.sweep;
  Report report;
  report.command = "sweep";
  report.csv.header = csv_header(Command::sweep);
  using detail::cell;
  for (double value : sweep_values(s.range.first, s.range.second, s.step)) {
    MLConfig m = s.base;
    set_ml_field(m, s.var, value);
    std::vector<SweepRecord> rows;
    try {
      const auto outcome = detail::run_ml(m);
      for (std::size_t i = 0; i < outcome.pairs.size(); ++i) {
        const auto& pair = outcome.pairs[i];
        rows.push_back({value, m.n, static_cast<int>(i), pair.energy, pair.root, pair.max_residual, pair.normalizable, ""});
      }
      if (outcome.pairs.empty()) rows.push_back({value, m.n, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt, "no eigenpair"});
      for (const auto& f : outcome.residual_failures)
        report.failures.push_back({{"value", value}, {"kind", "residual"}, {"message", f}});
    } catch (const std::exception& e) {
      rows.push_back({value, m.n, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt, e.what()});
    }
    for (const auto& r : rows) {
      report.results.push_back(to_json(r));
      report.csv.rows.push_back({cell(r.value), cell(r.n), cell(r.eigenpair), cell(r.energy), cell(r.root), cell(r.max_residual),
                                 cell(r.normalizable), r.error});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

/// Validates `cfg`, runs its command and fills in the echo and, if asked, the wall time.
inline Report run_command(const RunConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  Report report;
  switch (cfg.command) {
    case Command::verify: report = cmd_verify(cfg); break;
    case Command::bethe: report = cmd_bethe(cfg); break;
    case Command::ml: report = cmd_ml(cfg); break;
    case Command::sweep: report = cmd_sweep(cfg); break;
  }
  report.config_echo = to_json(cfg);
  if (cfg.common.timing) {
    report.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

}  // namespace heun::cli

#endif  // HEUN_CLI_COMMANDS_HPP
