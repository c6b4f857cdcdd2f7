#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "momsafe/config_io.hpp"
#include "momsafe/csv.hpp"
#include "momsafe/experiments.hpp"
#include "momsafe/risk_model.hpp"
#include "momsafe/units.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("MOMSAFE_OUT_DIR"); env && *env) return env;
  return "out";
}

struct RunOptions {
  std::string suite;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<long> duration;
  std::size_t parallelism = 0;
  std::string out;
  bool quiet = false;
};

void print_summary(const momsafe::SuiteResult& result) {
  fmt::print("{:<14} {:>6} {:>10} {:>12} {:>12} {:>12} {:>10} {:>10}\n", "scenario", "runs", "completed",
             "R_self", "R_other", "R_total", "travel_s", "admitted");
  for (const auto& s : result.scenarios) {
    const auto sum = momsafe::summarize(s, result.suite.steady_from);
    fmt::print("{:<14} {:>6} {:>10} {:>12.3f} {:>12.3f} {:>12.3f} {:>10.2f} {:>10.1f}\n", sum.label, sum.runs,
               sum.risk.completed, momsafe::ms_to_kmh(sum.risk.self), momsafe::ms_to_kmh(sum.risk.other),
               momsafe::ms_to_kmh(sum.risk.total()), sum.travel_time_mean, sum.admitted_mean);
  }
}

int cmd_run(const RunOptions& o) {
  auto suite = momsafe::resolve_suite(o.suite);
  if (o.seed) suite.seed = *o.seed;
  if (o.runs) suite.runs = *o.runs;
  if (o.duration) suite.duration = *o.duration;
  suite.validate();

  const std::filesystem::path out = o.out.empty() ? default_out_dir() / suite.name : std::filesystem::path(o.out);
  const std::size_t total = suite.runs * suite.scenarios.size();
  std::mutex mu;
  std::size_t done = 0;
  const auto start = std::chrono::steady_clock::now();
  momsafe::ProgressFn progress;
  if (!o.quiet) {
    progress = [&](const std::string&, std::size_t) {
      std::lock_guard lock(mu);
      ++done;
      if (done == total || done % std::max<std::size_t>(1, total / 20) == 0) {
        fmt::print(stderr, "\r{}: {}/{} runs", suite.name, done, total);
        if (done == total) fmt::print(stderr, "\n");
      }
    };
  }
  const auto result = momsafe::run_suite(suite, o.parallelism, progress);
  const auto files = momsafe::write_suite_csv(result, out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  print_summary(result);
  for (const auto& f : files) fmt::print("wrote {}\n", f.string());
  if (!o.quiet) fmt::print(stderr, "{:.1f} s\n", secs);
  return 0;
}

int cmd_validate(const std::string& path) {
  const auto suite = momsafe::resolve_suite(path);
  fmt::print("ok: suite '{}' with {} scenario(s), {} run(s) x {} steps\n", suite.name, suite.scenarios.size(),
             suite.runs, suite.duration);
  return 0;
}

int cmd_report(const std::string& dir) {
  const auto table = momsafe::read_csv(std::filesystem::path(dir) / "summary.csv");
  // One block per scenario keeps wide tables readable in a terminal.
  const std::size_t label = table.column("scenario");
  for (const auto& row : table.rows) {
    fmt::print("[{}]\n", row[label]);
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c == label) continue;
      fmt::print("  {:<24} {}\n", table.header[c], row[c].empty() ? "-" : row[c]);
    }
  }
  return 0;
}

int cmd_curves(const std::string& curves, const std::string& out, bool as_json) {
  const auto data = curves.empty() ? momsafe::default_injury_curves() : momsafe::load_injury_curves(curves);
  if (as_json) {
    std::cout << momsafe::injury_curves_to_json(data);
    return 0;
  }
  const std::filesystem::path path =
      out.empty() ? default_out_dir() / "injury_curves.csv" : std::filesystem::path(out);
  momsafe::write_injury_curves_csv(data, path);
  for (const auto& c : data) {
    if (c.level != momsafe::InjuryLevel::mais3) continue;
    fmt::print("{} MAIS3+ reaches p = 0.01 at {:.2f} km/h\n", momsafe::to_string(c.orientation),
               momsafe::ms_to_kmh(momsafe::delta_v_for_probability(c, 0.01)));
  }
  fmt::print("wrote {}\n", path.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Momentum-based access and speed control simulator"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run a built-in suite or a JSON suite/config file");
  run_cmd->add_option("suite", run.suite, "access_ABC | overtake_ABC | combined_ABCD | volume_CDEF | file.json")
      ->required();
  run_cmd->add_option("--seed", run.seed, "Master seed");
  run_cmd->add_option("--runs", run.runs, "Monte Carlo runs per scenario")->check(CLI::PositiveNumber);
  run_cmd->add_option("--duration", run.duration, "Steps per run")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--parallelism", run.parallelism, "Worker threads (0 = all cores)");
  run_cmd->add_option("--out", run.out, "Output directory (default $MOMSAFE_OUT_DIR/<suite> or out/<suite>)");
  run_cmd->add_flag("--quiet", run.quiet, "No progress output");

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a suite or config without running it");
  validate_cmd->add_option("config", validate_path, "Built-in suite name or JSON file")->required();

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Print summary.csv of a finished run");
  report_cmd->add_option("csv-dir", report_dir, "Directory written by 'run'")->required();

  std::string curves_in;
  std::string curves_out;
  auto* curves_cmd = app.add_subcommand("curves", "Tabulate injury-probability curves as CSV");
  curves_cmd->add_option("--curves", curves_in, "Injury curve JSON (default: built-in coefficients)");
  curves_cmd->add_option("--out", curves_out, "Output CSV path");
  bool curves_json = false;
  curves_cmd->add_flag("--json", curves_json, "Print the coefficients as JSON instead");

  std::string dump_name;
  auto* dump_cmd = app.add_subcommand("dump", "Print a built-in suite as editable JSON");
  dump_cmd->add_option("suite", dump_name, "Built-in suite name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*validate_cmd) return cmd_validate(validate_path);
    if (*report_cmd) return cmd_report(report_dir);
    if (*curves_cmd) return cmd_curves(curves_in, curves_out, curves_json);
    if (*dump_cmd) {
      std::cout << momsafe::suite_to_json(momsafe::builtin_suite(dump_name));
      return 0;
    }
  } catch (const momsafe::ConfigError& e) {
    fmt::print(stderr, "invalid configuration: {}\n", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitError;
  }
  return 0;
}
