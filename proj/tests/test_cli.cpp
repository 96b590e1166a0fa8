#include "heun/cli/app.hpp"
#include "heun/cli/commands.hpp"
#include "heun/cli/config.hpp"
#include "heun/cli/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <unistd.h>
#include <sstream>
#include <string>
#include <vector>

using namespace heun;
using namespace heun::cli;
using nlohmann::json;

namespace {

struct CliRun {
  int status = 0;
  std::string out;
  std::string err;
};

CliRun run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"heun"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

RunConfig parse(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"heun"};
  argv.insert(argv.end(), args.begin(), args.end());
  return parse_command_line(static_cast<int>(argv.size()), argv.data()).config;
}

class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("heun_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".toml"))
                .string();
    std::ofstream(path_) << contents;
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const char* path() const { return path_.c_str(); }

 private:
  std::string path_;
};

RunConfig busy_config(Command command) {
  RunConfig cfg;
  cfg.command = command;
  cfg.common.seed = 987654321012345ULL;
  cfg.common.format = OutputFormat::csv;
  cfg.common.out = "report.csv";
  cfg.common.precision = command == Command::verify ? Precision::exact : Precision::floating;
  cfg.common.timing = true;
  cfg.verify = {17, 9, {4, 7}, {1, 5}, 2.5e-9, "closed_form"};
  cfg.bethe = {3, {"1/3", "-2", "0.125", "7"}, {"1", "-1/7", "2e-3"}, 4, 9, {-2.75, 3.1}, 3e-12, 77};
  cfg.ml = {-0.3, 0.1, 1.0 / 3.0, -2.5, 1, 1, {0.05, 1.7, 33}, 2e-7};
  cfg.sweep.base = {2.0, -0.4, 0.2, 0.9, 0, 1, {0.2, 2.0, 11}, 5e-6};
  cfg.sweep.var = "b2";
  cfg.sweep.range = {-1.0, 1.0 / 7.0};
  cfg.sweep.step = 0.1;
  return cfg;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

const json& result(const Report& r, std::size_t i) { return r.results.at(i); }

}  // namespace

// ---------------------------------------------------------------------------
// configuration

TEST(Config, FileRoundTripIsLossless) {
  for (auto command : {Command::verify, Command::bethe, Command::ml, Command::sweep}) {
    const RunConfig cfg = busy_config(command);
    TempFile file(write_config(cfg));
    const RunConfig back = parse({to_string(command), "--config", file.path()});
    EXPECT_EQ(back, cfg) << write_config(back);
  }
}

TEST(Config, DefaultsRoundTrip) {
  RunConfig cfg;
  cfg.command = Command::ml;
  TempFile file(write_config(cfg));
  EXPECT_EQ(parse({"ml", "--config", file.path()}), cfg);
  EXPECT_EQ(parse({"ml"}), cfg);
}

TEST(Config, FlagsOverrideFile) {
  TempFile file("seed = 9\n[bethe]\nk = 2\ncoeff-x = [\"-1\", \"0\", \"1\"]\ncoeff-y = [\"-2\", \"0\"]\nn = 3\n");
  const auto cfg = parse({"bethe", "--config", file.path(), "--seed", "4", "--n", "2"});
  EXPECT_EQ(cfg.common.seed, 4u);
  EXPECT_EQ(cfg.bethe.n, 2);
  EXPECT_EQ(cfg.bethe.coeff_x, (std::vector<std::string>{"-1", "0", "1"}));
  const auto order = parse({"--seed", "5", "bethe", "--config", file.path()});
  EXPECT_EQ(order.common.seed, 5u);
}

TEST(Config, UnknownFieldNamesLine) {
  TempFile file("seed = 2\n[bethe]\nk = 2\nkk = 3\n");
  try {
    parse({"bethe", "--config", file.path()});
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find(":4:"), std::string::npos) << what;
    EXPECT_NE(what.find("unknown field 'kk' in [bethe]"), std::string::npos) << what;
  }
  TempFile section("[bogus]\nk = 1\n");
  EXPECT_THROW(parse({"bethe", "--config", section.path()}), UsageError);
  EXPECT_THROW(parse({"bethe", "--config", "/nonexistent/heun.toml"}), UsageError);
}

TEST(Config, BadValueNamesFieldAndLine) {
  TempFile file("# comment\n[bethe]\nk = two\n");
  try {
    parse({"bethe", "--config", file.path()});
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("--k"), std::string::npos) << what;
    EXPECT_NE(what.find("config line 3"), std::string::npos) << what;
  }
}

TEST(Config, PrecisionFlags) {
  EXPECT_EQ(parse({"verify"}).precision(), Precision::exact);
  EXPECT_EQ(parse({"verify", "--float"}).precision(), Precision::floating);
  EXPECT_EQ(parse({"bethe"}).precision(), Precision::floating);
  EXPECT_EQ(parse({"ml", "--precision", "exact"}).precision(), Precision::exact);
  EXPECT_THROW(parse({"verify", "--exact", "--float"}), UsageError);
}

TEST(Config, JsonEchoRoundTrip) {
  for (auto command : {Command::verify, Command::bethe, Command::ml, Command::sweep}) {
    RunConfig cfg = busy_config(command);
    const RunConfig back = run_config_from_json(json::parse(to_json(cfg).dump()));
    EXPECT_EQ(back.command, cfg.command);
    CommonConfig common = cfg.common;
    common.out.clear();
    EXPECT_EQ(back.common, common);
    switch (command) {
      case Command::verify: EXPECT_EQ(back.verify, cfg.verify); break;
      case Command::bethe: EXPECT_EQ(back.bethe, cfg.bethe); break;
      case Command::ml: EXPECT_EQ(back.ml, cfg.ml); break;
      case Command::sweep: EXPECT_EQ(back.sweep, cfg.sweep); break;
    }
  }
}

TEST(Config, Validation) {
  RunConfig cfg = parse({"bethe", "--coeff-x=-1,0,1", "--coeff-y=-2,0", "--n", "2"});
  EXPECT_NO_THROW(validate(cfg));
  cfg.bethe.coeff_y = {"1"};
  EXPECT_THROW(validate(cfg), UsageError);
  cfg = parse({"bethe", "--coeff-x=-1,0,1", "--coeff-y=-2,0"});
  EXPECT_THROW(validate(cfg), UsageError);  // n missing
  cfg = parse({"sweep", "--step", "0"});
  EXPECT_THROW(validate(cfg), UsageError);
  cfg = parse({"ml", "--lambda", "0"});
  EXPECT_THROW(validate(cfg), UsageError);
  cfg = parse({"verify", "--k-range", "5,3"});
  EXPECT_THROW(validate(cfg), UsageError);
}

// ---------------------------------------------------------------------------
// reports

TEST(Report, JsonRoundTripAllCommands) {
  const std::vector<RunConfig> configs{
      parse({"verify", "--instances", "10", "--aux-instances", "5"}),
      parse({"verify", "--instances", "5", "--aux-instances", "5", "--inject-fault", "closed_form"}),
      parse({"bethe", "--coeff-x=-1,0,1", "--coeff-y=-2,0", "--n", "3", "--starts", "8"}),
      parse({"ml", "--lambda", "1", "--a", "1", "--b1", "1", "--b2", "1", "--n", "1"}),
      parse({"ml", "--lambda", "1", "--a", "1", "--b1", "-1", "--b2", "-1"}),
      parse({"sweep", "--lambda", "1", "--a", "1", "--b2", "1", "--range", "0,1", "--step", "0.5"}),
  };
  for (const auto& cfg : configs) {
    const Report report = run_command(cfg);
    const Report back = report_from_json(json::parse(render(report, OutputFormat::json)));
    EXPECT_TRUE(same_json_content(report, back)) << to_json(report).dump();
    for (const auto& r : back.results) {
      switch (cfg.command) {
        case Command::verify: EXPECT_EQ(to_json(suite_record_from_json(r)), r); break;
        case Command::bethe: EXPECT_EQ(to_json(bethe_record_from_json(r)), r); break;
        case Command::ml: EXPECT_EQ(to_json(eigenpair_record_from_json(r)), r); break;
        case Command::sweep: EXPECT_EQ(to_json(sweep_record_from_json(r)), r); break;
      }
    }
  }
}

TEST(Report, TypedRecordsRoundTrip) {
  EigenpairRecord e;
  e.n = 1;
  e.root = 0.1 + 0.2;
  e.energy = 1.0 / 3.0;
  e.norm_error = "NotNormalizable: b2 > 0";
  e.max_residual = 1e-300;
  EXPECT_EQ(eigenpair_record_from_json(json::parse(to_json(e).dump())), e);
  SweepRecord s{0.25, 0, std::nullopt, std::nullopt, std::nullopt, std::nullopt, false, "lambda must be nonzero"};
  EXPECT_EQ(sweep_record_from_json(json::parse(to_json(s).dump())), s);
  BetheRecord b{{-0.5773502691896258, 0.5773502691896258}, 1e-17, {6.000000000000001}, 2e-15};
  EXPECT_EQ(bethe_record_from_json(json::parse(to_json(b).dump())), b);
}

TEST(Report, SchemaAndTiming) {
  auto r = run({"verify", "--instances", "3", "--aux-instances", "3"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto j = json::parse(r.out);
  for (const char* key : {"command", "config_echo", "results", "failures", "timing_ms"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_TRUE(j["timing_ms"].is_null());
  auto timed = run({"verify", "--instances", "3", "--aux-instances", "3", "--timing"});
  EXPECT_TRUE(json::parse(timed.out)["timing_ms"].is_number());
}

TEST(Report, CsvQuoting) {
  CsvTable t{{"a", "b"}, {{"x,y", "say \"hi\""}}};
  EXPECT_EQ(render_csv(t), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
}

// ---------------------------------------------------------------------------
// verify

TEST(Verify, DefaultSuitesPass) {
  const Report report = run_command(parse({"verify", "--instances", "60", "--aux-instances", "40"}));
  ASSERT_EQ(report.results.size(), 5u);
  for (const auto& suite : report.results) EXPECT_TRUE(suite["ok"].get<bool>()) << suite.dump();
  EXPECT_EQ(report.exit_code(), 0);
}

TEST(Verify, FloatModePasses) {
  const Report report = run_command(parse({"verify", "--float", "--instances", "40", "--aux-instances", "20"}));
  EXPECT_EQ(report.exit_code(), 0) << to_json(report).dump();
}

TEST(Verify, InjectedFaultIsCaught) {
  auto r = run({"verify", "--instances", "20", "--aux-instances", "10", "--inject-fault", "closed_form"});
  EXPECT_EQ(r.status, 1);
  const auto j = json::parse(r.out);
  ASSERT_FALSE(j["failures"].empty());
  bool route_failed = false;
  for (const auto& f : j["failures"]) {
    if (f["suite"] == "route_equivalence") {
      route_failed = true;
      const auto& ce = f["counterexample"];
      EXPECT_TRUE(ce.contains("roots"));
      EXPECT_TRUE(ce.contains("x_ascending"));
      EXPECT_TRUE(ce["mismatch"].contains("lhs"));
    }
  }
  EXPECT_TRUE(route_failed);
}

TEST(Verify, TrivialRange) {
  const Report report = run_command(parse({"verify", "--k-range", "3,3", "--n-range", "0,0", "--instances", "20", "--aux-instances", "10"}));
  EXPECT_EQ(report.exit_code(), 0);
}

// ---------------------------------------------------------------------------
// bethe

TEST(Bethe, LegendreQuadratic) {
  const Report report = run_command(parse({"bethe", "--coeff-x=-1,0,1", "--coeff-y=-2,0", "--n", "2"}));
  ASSERT_EQ(report.results.size(), 1u);
  const auto rec = bethe_record_from_json(result(report, 0));
  EXPECT_NEAR(rec.roots[0], -0.5773502692, 1e-10);
  EXPECT_NEAR(rec.roots[1], 0.5773502692, 1e-10);
  ASSERT_EQ(rec.z_coefficients.size(), 1u);
  EXPECT_NEAR(rec.z_coefficients[0], 6.0, 1e-9);
  EXPECT_LT(rec.ode_residual, 1e-9);
  EXPECT_EQ(report.exit_code(), 0);
}

TEST(Bethe, LegendreCubic) {
  const Report report = run_command(parse({"bethe", "--coeff-x=-1,0,1", "--coeff-y=-2,0", "--n", "3"}));
  ASSERT_EQ(report.results.size(), 1u);
  const auto rec = bethe_record_from_json(result(report, 0));
  EXPECT_NEAR(rec.roots[0], -0.7745966692, 1e-10);
  EXPECT_NEAR(rec.roots[1], 0.0, 1e-10);
  EXPECT_NEAR(rec.roots[2], 0.7745966692, 1e-10);
}

TEST(Bethe, OscillatorRoot) {
  const Report report =
      run_command(parse({"bethe", "--k", "4", "--coeff-x=4,-4,0,0,0", "--coeff-y=14,-4,8,-16", "--n", "1"}));
  ASSERT_EQ(report.results.size(), 1u);
  const auto rec = bethe_record_from_json(result(report, 0));
  EXPECT_NEAR(rec.roots[0], 0.95018, 1e-5);
  EXPECT_EQ(rec.z_coefficients.size(), 3u);
}

TEST(Bethe, RationalCoefficientsAndCsv) {
  auto r = run({"bethe", "--coeff-x=-1,0,1", "--coeff-y=-2/1,0.0", "--n", "2", "--format", "csv"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "solution,roots,bethe_residual,ode_residual,z_coefficients");
  EXPECT_EQ(rows[1].rfind("0,-0.57735026918962", 0), 0u) << rows[1];
}

TEST(Bethe, NoSolutionIsNotAFailure) {
  const Report report = run_command(parse({"bethe", "--coeff-x=1,0,1", "--coeff-y=0,1", "--n", "1", "--starts", "4"}));
  EXPECT_TRUE(report.results.empty());
  EXPECT_EQ(report.exit_code(), 0);
  bool noted = false;
  for (const auto& n : report.notes) noted = noted || n == "no solution found";
  EXPECT_TRUE(noted);
}

// ---------------------------------------------------------------------------
// ml and sweep

TEST(Ml, GroundState) {
  const Report report = run_command(parse({"ml", "--lambda", "1", "--a", "1", "--b1", "1", "--b2", "1"}));
  ASSERT_EQ(report.results.size(), 1u);
  const auto rec = eigenpair_record_from_json(result(report, 0));
  EXPECT_EQ(rec.energy, 8.0);
  EXPECT_EQ(rec.A, 6.0);
  EXPECT_EQ(rec.B1, -4.0);
  EXPECT_EQ(rec.B2, -12.0);
  EXPECT_EQ(rec.B3, 0.0);
  EXPECT_EQ(rec.B4, 16.0);
  EXPECT_EQ(rec.node_count, 0);
  ASSERT_TRUE(rec.max_residual.has_value());
  EXPECT_LT(*rec.max_residual, 1e-6);
  EXPECT_EQ(rec.grid_points, 50);
  ASSERT_TRUE(rec.norm.has_value());
  EXPECT_LT(*rec.norm_change, 1e-6);
  EXPECT_EQ(report.exit_code(), 0);
}

TEST(Ml, FirstExcited) {
  const Report report = run_command(parse({"ml", "--lambda", "1", "--a", "1", "--b1", "1", "--b2", "1", "--n", "1"}));
  ASSERT_EQ(report.results.size(), 1u);
  const auto rec = eigenpair_record_from_json(result(report, 0));
  EXPECT_NEAR(rec.energy, 31.30, 0.01);
  EXPECT_EQ(rec.A, 20.0);
  EXPECT_EQ(rec.node_count, 2);
  EXPECT_EQ(report.exit_code(), 0);
}

TEST(Ml, NotNormalizableIsAnEntry) {
  auto r = run({"ml", "--lambda", "1", "--a", "1", "--b1", "-1", "--b2", "-1"});
  EXPECT_EQ(r.status, 0) << r.err;
  const auto rec = eigenpair_record_from_json(json::parse(r.out)["results"].at(0));
  EXPECT_FALSE(rec.normalizable);
  EXPECT_FALSE(rec.norm.has_value());
  ASSERT_TRUE(rec.norm_error.has_value());
  EXPECT_EQ(rec.norm_error->rfind("NotNormalizable", 0), 0u);
}

TEST(Ml, GridBeyondBoundedRangeIsClipped) {
  const Report report = run_command(parse({"ml", "--lambda", "-0.5", "--a", "0.1", "--b1", "0.2", "--b2", "0.3", "--grid", "0.1,3,30"}));
  const auto rec = eigenpair_record_from_json(result(report, 0));
  EXPECT_GT(rec.grid_points, 0);
  EXPECT_LT(rec.grid_points, 30);
  EXPECT_TRUE(rec.norm.has_value());
}

TEST(Ml, ExactModeIsAUsageError) {
  EXPECT_EQ(run({"ml", "--exact"}).status, 2);
  EXPECT_EQ(run({"bethe", "--exact", "--coeff-x=-1,0,1", "--coeff-y=-2,0", "--n", "2"}).status, 2);
}

TEST(Sweep, GroundEnergyIsLinearInB1) {
  const Report report =
      run_command(parse({"sweep", "--lambda", "1", "--a", "1", "--b2", "1", "--var", "b1", "--range", "0,2", "--step", "0.25"}));
  ASSERT_EQ(report.results.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) {
    const auto rec = sweep_record_from_json(result(report, i));
    EXPECT_EQ(rec.value, 0.25 * static_cast<double>(i));
    ASSERT_TRUE(rec.energy.has_value());
    EXPECT_NEAR(*rec.energy, 6 * rec.value + 2, 1e-12);
  }
  EXPECT_EQ(report.csv.rows.size(), 9u);
}

TEST(Sweep, NotNormalizableRegionIsFlagged) {
  const Report report =
      run_command(parse({"sweep", "--lambda", "1", "--a", "1", "--b1", "0.5", "--var", "b2", "--range", "-1,1", "--step", "0.5"}));
  ASSERT_EQ(report.results.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto rec = sweep_record_from_json(result(report, i));
    EXPECT_EQ(*rec.normalizable, rec.value > 0) << rec.value;
  }
}

TEST(Sweep, ErrorsStayInRow) {
  const Report report = run_command(parse({"sweep", "--var", "lambda", "--range", "-1,1", "--step", "1", "--a", "0.1"}));
  ASSERT_EQ(report.results.size(), 3u);
  const auto middle = sweep_record_from_json(result(report, 1));
  EXPECT_EQ(middle.value, 0.0);
  EXPECT_FALSE(middle.energy.has_value());
  EXPECT_NE(middle.error.find("lambda"), std::string::npos);
  EXPECT_TRUE(sweep_record_from_json(result(report, 2)).energy.has_value());
}

TEST(Sweep, EmptyRangeGivesHeaderOnly) {
  auto r = run({"sweep", "--range", "1,0", "--format", "csv"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "value,n,eigenpair,energy,root,max_residual,normalizable,error\n");
}

TEST(Sweep, Values) {
  EXPECT_EQ(sweep_values(0, 2, 0.25).size(), 9u);
  EXPECT_EQ(sweep_values(0, 1, 0.1).size(), 11u);
  EXPECT_EQ(sweep_values(0.5, 0.5, 1).size(), 1u);
  EXPECT_TRUE(sweep_values(1, 0, 0.1).empty());
}

// ---------------------------------------------------------------------------
// exit codes and determinism

TEST(ExitCodes, Contract) {
  EXPECT_EQ(run({"verify", "--instances", "5", "--aux-instances", "5"}).status, 0);
  EXPECT_EQ(run({"verify", "--instances", "5", "--aux-instances", "5", "--inject-fault", "closed_form"}).status, 1);
  EXPECT_EQ(run({"bethe", "--n", "2"}).status, 2);
  EXPECT_EQ(run({}).status, 2);
  EXPECT_EQ(run({"frobnicate"}).status, 2);
  EXPECT_EQ(run({"verify", "--format", "xml"}).status, 2);
  EXPECT_EQ(run({"bethe", "--coeff-x=a,0,1", "--coeff-y=-2,0", "--n", "2"}).status, 2);
  EXPECT_EQ(run({"bethe", "--coeff-x=0,0,1", "--coeff-y=-2,0", "--n", "2"}).status, 2);
  auto help = run({"--help"});
  EXPECT_EQ(help.status, 0);
  EXPECT_NE(help.out.find("bethe"), std::string::npos);
  auto sub_help = run({"bethe", "--help"});
  EXPECT_EQ(sub_help.status, 0);
  EXPECT_NE(sub_help.out.find("--coeff-x"), std::string::npos);
}

TEST(Determinism, IdenticalOutput) {
  for (auto args : {std::initializer_list<const char*>{"verify", "--seed", "11", "--instances", "15", "--aux-instances", "10"},
                    std::initializer_list<const char*>{"bethe", "--seed", "11", "--coeff-x=-1,0,1", "--coeff-y=-2,0", "--n", "4"},
                    std::initializer_list<const char*>{"sweep", "--format", "csv", "--range", "0,1", "--step", "0.5"}}) {
    const auto a = run(args);
    const auto b = run(args);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.out, b.out);
  }
}

TEST(Output, WritesFile) {
  const auto path = (std::filesystem::temp_directory_path() / "heun_cli_out_test.json").string();
  auto r = run({"ml", "--out", path.c_str()});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(json::parse(ss.str())["command"], "ml");
  std::remove(path.c_str());
  EXPECT_EQ(run({"ml", "--out", "/nonexistent/dir/x.json"}).status, 2);
}
