#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "momsafe/metrics.hpp"
#include "momsafe/scenarios.hpp"

namespace momsafe {

struct ScenarioResult {
  std::string label;
  std::size_t classes = 0;  // number of momentum classes (0 without a gate)
  std::vector<RunMetrics> runs;  // indexed by run
};

struct SuiteResult {
  ScenarioSuite suite;
  std::vector<ScenarioResult> scenarios;

  const ScenarioResult& scenario(std::string_view label) const;
};

/// Called after each finished run, possibly from a worker thread.
using ProgressFn = std::function<void(const std::string& scenario, std::size_t run)>;

/// Validates the suite, then runs every (scenario, run) pair on up to
/// `parallelism` threads (0 picks the hardware concurrency). Thinned
/// scenarios start once their quota source has finished the same run.
SuiteResult run_suite(const ScenarioSuite& suite, std::size_t parallelism = 1, const ProgressFn& progress = {});

/// Mean risk exceedance over the vehicles that completed their transit of
/// the restricted edge. Vehicles still on it at the end are only counted.
struct RiskAggregate {
  double self = 0.0;   // m/s summed per step
  double other = 0.0;
  long completed = 0;
  long incomplete = 0;

  double total() const noexcept { return self + other; }
};

RiskAggregate aggregate_risk(std::span<const VehicleRecord> vehicles);
RiskAggregate aggregate_risk(std::span<const RunMetrics> runs);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for fewer than two values
};

MeanSd mean_sd(std::span<const double> values);

/// Per-scenario figures reported in summary.csv. Pooled means are over all
/// vehicles (or steps) of all runs; `*_run_sd` is the spread of per-run means.
struct ScenarioSummary {
  std::string label;
  std::size_t runs = 0;
  RiskAggregate risk{};
  double risk_total_run_sd = 0.0;
  double travel_time_mean = 0.0;  // s, completed transits
  double travel_time_run_sd = 0.0;
  double spawned_mean = 0.0;
  double crossings_mean = 0.0;  // gate sensor crossings per run
  double admitted_mean = 0.0;   // gate admissions per run
  double entered_main_mean = 0.0;
  double yhat_steady_mean = 0.0;  // veh/min over the steady window
  double error_steady_mean = 0.0;
  double pi_steady_mean = 0.0;
  std::vector<double> class_share_steady;  // admits / requests per class over the steady window
  std::vector<double> class_mix_main;      // fraction of main entries per class
};

ScenarioSummary summarize(const ScenarioResult& result, long steady_from);

/// Pooled admitted / requested per class over steps >= steady_from.
std::vector<double> class_access_share(std::span<const RunMetrics> runs, std::size_t classes, long steady_from);

/// Writes summary.csv, timeseries.csv and vehicles.csv (and traces.csv when
/// any run recorded traces) into `dir`, creating it if needed. Returns the
/// written paths.
std::vector<std::filesystem::path> write_suite_csv(const SuiteResult& result, const std::filesystem::path& dir);

/// p(dv) for every curve on a 0.5 km/h grid across its validity range.
void write_injury_curves_csv(std::span<const InjuryCurve> curves, const std::filesystem::path& path);

}  // namespace momsafe
