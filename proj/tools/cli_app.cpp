#include "heun/cli/app.hpp"

#include "heun/cli/commands.hpp"
#include "heun/cli/config.hpp"
#include "heun/cli/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace heun::cli {

namespace {

void add_ml_options(CLI::App* sub, MLConfig& m) {
  sub->add_option("--lambda", m.lambda, "Mass parameter lambda (nonzero)")->capture_default_str();
  sub->add_option("--a", m.a, "Potential parameter a")->capture_default_str();
  sub->add_option("--b1", m.b1, "Potential parameter b1")->capture_default_str();
  sub->add_option("--b2", m.b2, "Potential parameter b2")->capture_default_str();
  sub->add_option("--p", m.p, "Parity label, 0 (even) or 1 (odd)")->capture_default_str();
  sub->add_option("--n", m.n, "Degree of the polynomial part, 0 or 1")->capture_default_str();
  sub->add_option("--grid", m.grid, "Residual scan grid lo,hi,count")->delimiter(',')->capture_default_str();
  sub->add_option("--residual-tol", m.residual_tol, "Largest acceptable relative Schroedinger residual")
      ->capture_default_str();
}

std::optional<std::string> config_path(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return std::nullopt;
}

}  // namespace

ParsedArgs parse_command_line(int argc, const char* const* argv) {
  ParsedArgs parsed;
  RunConfig& cfg = parsed.config;

  CLI::App app{"Polynomial solutions of X y'' + Y y' + Z y = 0: identity checks, Bethe roots and oscillator spectra.",
               "heun"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "Read settings from a key-value file; command-line flags take precedence");

  std::string format = "json";
  std::string precision;
  app.add_option("--seed", cfg.common.seed, "Random seed")->capture_default_str();
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--out", cfg.common.out, "Write the report to this file instead of standard output");
  auto* exact = app.add_flag("--exact", "Exact rational arithmetic (verify only; its default)");
  auto* floating = app.add_flag("--float", "Floating-point arithmetic (default for bethe, ml, sweep)");
  exact->excludes(floating);
  app.add_option("--precision", precision, "exact or float; same as --exact / --float")
      ->check(CLI::IsMember({"exact", "float"}));
  app.add_flag("--timing", cfg.common.timing, "Record wall time in timing_ms (output is then not reproducible)");

  auto* verify = app.add_subcommand("verify", "Run the seeded identity suites on random exact instances");
  auto& v = cfg.verify;
  verify->add_option("--instances", v.instances, "Route-equivalence instances")->capture_default_str();
  verify->add_option("--aux-instances", v.aux_instances, "Instances for each of the other suites")->capture_default_str();
  verify->add_option("--k-range", v.k_range, "Range of k as lo,hi")->delimiter(',')->capture_default_str();
  verify->add_option("--n-range", v.n_range, "Range of n as lo,hi")->delimiter(',')->capture_default_str();
  verify->add_option("--tolerance", v.tolerance, "Relative tolerance in float mode")->capture_default_str();
  verify->add_option("--inject-fault", v.inject_fault, "Corrupt the closed form on purpose (none, closed_form)")
      ->check(CLI::IsMember({"none", "closed_form"}))
      ->capture_default_str();

  auto* bethe = app.add_subcommand("bethe", "Solve the Bethe ansatz equations for a degree-n solution");
  auto& b = cfg.bethe;
  bethe->add_option("--k", b.k, "Order k of the system (deg X <= k)")->capture_default_str();
  bethe->add_option("--coeff-x", b.coeff_x, "Coefficients of X, highest first: a_k,...,a_0")->delimiter(',');
  bethe->add_option("--coeff-y", b.coeff_y, "Coefficients of Y, highest first: b_{k-1},...,b_0")->delimiter(',');
  bethe->add_option("--n", b.n, "Number of roots")->capture_default_str();
  bethe->add_option("--starts", b.starts, "Number of Newton starts")->capture_default_str();
  bethe->add_option("--interval", b.interval, "Interval for initial guesses as lo,hi")->delimiter(',')->capture_default_str();
  bethe->add_option("--tol", b.tol, "Newton tolerance on the largest residual")->capture_default_str();
  bethe->add_option("--max-iterations", b.max_iterations, "Newton iterations per start")->capture_default_str();

  auto* ml = app.add_subcommand("ml", "Eigenpairs of the extended Mathews-Lakshmanan oscillator");
  add_ml_options(ml, cfg.ml);

  auto* sweep = app.add_subcommand("sweep", "Oscillator eigenpairs along one parameter");
  add_ml_options(sweep, cfg.sweep.base);
  sweep->add_option("--var", cfg.sweep.var, "Parameter to sweep: lambda, a, b1 or b2")
      ->check(CLI::IsMember({"lambda", "a", "b1", "b2"}))
      ->capture_default_str();
  sweep->add_option("--range", cfg.sweep.range, "Sweep range lo,hi")->delimiter(',')->capture_default_str();
  sweep->add_option("--step", cfg.sweep.step, "Sweep step")->capture_default_str();

  std::vector<ConfigKeyLocation> locations;
  if (auto path = config_path(argc, argv)) locations = scan_config_file(*path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    parsed.help = os.str();
    return parsed;
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    for (const auto& loc : locations) {
      const std::string flag = "--" + loc.key;
      const auto at = message.find(flag);
      if (at == std::string::npos) continue;
      const auto after = at + flag.size();
      if (after < message.size() && (std::isalnum(static_cast<unsigned char>(message[after])) || message[after] == '-')) continue;
      message += " (config line " + std::to_string(loc.line) + (loc.section.empty() ? "" : ", [" + loc.section + "]") + ")";
      break;
    }
    throw UsageError(message);
  }

  cfg.command = command_from_string(app.get_subcommands().at(0)->get_name());
  cfg.common.format = format_from_string(format);
  if (exact->count() > 0) {
    cfg.common.precision = Precision::exact;
  } else if (floating->count() > 0) {
    cfg.common.precision = Precision::floating;
  } else if (!precision.empty()) {
    cfg.common.precision = precision_from_string(precision);
  }
  return parsed;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ParsedArgs parsed;
  try {
    parsed = parse_command_line(argc, argv);
  } catch (const UsageError& e) {
    err << "heun: " << e.what() << "\n";
    return 2;
  }
  if (parsed.help) {
    out << *parsed.help;
    return 0;
  }

  Report report;
  try {
    report = run_command(parsed.config);
  } catch (const UsageError& e) {
    err << "heun: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "heun: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "heun: error: " << e.what() << "\n";
    return 1;
  }

  const std::string text = render(report, parsed.config.common.format);
  if (parsed.config.common.out.empty()) {
    out << text;
  } else {
    std::ofstream file(parsed.config.common.out, std::ios::binary);
    if (!file) {
      err << "heun: cannot write '" << parsed.config.common.out << "'\n";
      return 2;
    }
    file << text;
  }
  if (report.exit_code() != 0) err << "heun: " << report.failures.size() << " failure(s)\n";
  return report.exit_code();
}

}  // namespace heun::cli
