#include "momsafe/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "momsafe/csv.hpp"
#include "momsafe/units.hpp"

namespace momsafe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Job {
  std::size_t scenario;
  std::size_t run;
};

template <class Fn>
void parallel_for(const std::vector<Job>& jobs, std::size_t threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        fn(jobs[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs.size());
      }
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(jobs.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

std::size_t class_count(const ScenarioResult& r) { return r.classes; }

std::string class_cell(const VehicleRecord& v, std::size_t classes) {
  return classes == 0 ? std::string() : fmt::format("{}", v.class_index);
}

std::string optional_step(const std::optional<long>& s) {
  return s ? fmt::format("{}", *s) : std::string();
}

}  // namespace

const ScenarioResult& SuiteResult::scenario(std::string_view label) const {
  for (const auto& s : scenarios) {
    if (s.label == label) return s;
  }
  throw ConfigError(fmt::format("no scenario '{}' in results of '{}'", label, suite.name));
}

SuiteResult run_suite(const ScenarioSuite& suite, std::size_t parallelism, const ProgressFn& progress) {
  suite.validate();
  if (parallelism == 0) parallelism = std::max(1u, std::thread::hardware_concurrency());

  SuiteResult result;
  result.suite = suite;
  std::vector<std::size_t> source(suite.scenarios.size(), 0);
  std::vector<Job> independent;
  std::vector<Job> dependent;
  for (std::size_t s = 0; s < suite.scenarios.size(); ++s) {
    const auto& spec = suite.scenarios[s];
    ScenarioResult r;
    r.label = spec.label;
    r.classes = spec.config.access.classes.size();
    r.runs.resize(suite.runs);
    result.scenarios.push_back(std::move(r));
    if (spec.quota_from) {
      for (std::size_t j = 0; j < s; ++j) {
        if (suite.scenarios[j].label == *spec.quota_from) source[s] = j;
      }
    }
    for (std::size_t run = 0; run < suite.runs; ++run) {
      (spec.quota_from ? dependent : independent).push_back({s, run});
    }
  }

  auto execute = [&](const Job& job) {
    const auto& spec = suite.scenarios[job.scenario];
    SimConfig config = suite.run_config(spec, job.run);
    if (spec.quota_from) {
      const auto& src = result.scenarios[source[job.scenario]].runs[job.run];
      config.access.quota = src.gate_admitted;
      config.access.quota_pool = src.gate_crossings;
    }
    Simulation sim(std::move(config));
    sim.run();
    result.scenarios[job.scenario].runs[job.run] = sim.take_metrics();
    if (progress) progress(spec.label, job.run);
  };
  parallel_for(independent, parallelism, execute);
  parallel_for(dependent, parallelism, execute);
  return result;
}

RiskAggregate aggregate_risk(std::span<const VehicleRecord> vehicles) {
  RiskAggregate a;
  for (const auto& v : vehicles) {
    if (!v.entered_main) continue;
    if (!v.completed()) {
      ++a.incomplete;
      continue;
    }
    a.self += v.risk.self;
    a.other += v.risk.other;
    ++a.completed;
  }
  if (a.completed > 0) {
    a.self /= static_cast<double>(a.completed);
    a.other /= static_cast<double>(a.completed);
  }
  return a;
}

RiskAggregate aggregate_risk(std::span<const RunMetrics> runs) {
  RiskAggregate a;
  for (const auto& run : runs) {
    const auto r = aggregate_risk(run.vehicles);
    a.self += r.self * static_cast<double>(r.completed);
    a.other += r.other * static_cast<double>(r.completed);
    a.completed += r.completed;
    a.incomplete += r.incomplete;
  }
  if (a.completed > 0) {
    a.self /= static_cast<double>(a.completed);
    a.other /= static_cast<double>(a.completed);
  }
  return a;
}

MeanSd mean_sd(std::span<const double> values) {
  MeanSd m;
  if (values.empty()) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return m;
  double sq = 0.0;
  for (double v : values) sq += (v - m.mean) * (v - m.mean);
  m.sd = std::sqrt(sq / static_cast<double>(values.size() - 1));
  return m;
}

std::vector<double> class_access_share(std::span<const RunMetrics> runs, std::size_t classes, long steady_from) {
  std::vector<double> requests(classes, 0.0);
  std::vector<double> admits(classes, 0.0);
  for (const auto& run : runs) {
    for (const auto& s : run.series) {
      if (s.step < steady_from) continue;
      for (std::size_t c = 0; c < classes; ++c) {
        requests[c] += s.requests[c];
        admits[c] += s.admits[c];
      }
    }
  }
  std::vector<double> share(classes, kNaN);
  for (std::size_t c = 0; c < classes; ++c) {
    if (requests[c] > 0.0) share[c] = admits[c] / requests[c];
  }
  return share;
}

ScenarioSummary summarize(const ScenarioResult& result, long steady_from) {
  ScenarioSummary s;
  s.label = result.label;
  s.runs = result.runs.size();
  s.risk = aggregate_risk(result.runs);

  std::vector<double> run_risk;
  std::vector<double> run_travel;
  double tt_sum = 0.0;
  long tt_n = 0;
  double yhat = 0.0, error = 0.0, pi = 0.0;
  long steady_steps = 0;
  std::vector<double> mix(result.classes, 0.0);
  double entered = 0.0;
  for (const auto& run : result.runs) {
    const auto r = aggregate_risk(run.vehicles);
    if (r.completed > 0) run_risk.push_back(r.total());
    double run_tt = 0.0;
    long run_n = 0;
    for (const auto& v : run.vehicles) {
      if (v.entered_main) {
        entered += 1.0;
        if (result.classes > 0) mix[v.class_index] += 1.0;
      }
      if (!v.completed()) continue;
      run_tt += static_cast<double>(v.travel_time());
      ++run_n;
    }
    if (run_n > 0) run_travel.push_back(run_tt / static_cast<double>(run_n));
    tt_sum += run_tt;
    tt_n += run_n;
    s.spawned_mean += run.series.empty() ? 0.0 : static_cast<double>(run.series.back().spawned);
    s.crossings_mean += static_cast<double>(run.gate_crossings);
    s.admitted_mean += static_cast<double>(run.gate_admitted);
    for (const auto& step : run.series) {
      if (step.step < steady_from) continue;
      yhat += step.yhat;
      error += step.error;
      pi += step.pi;
      ++steady_steps;
    }
  }
  const double n_runs = std::max<double>(1.0, static_cast<double>(s.runs));
  s.risk_total_run_sd = mean_sd(run_risk).sd;
  s.travel_time_mean = tt_n > 0 ? tt_sum / static_cast<double>(tt_n) : kNaN;
  s.travel_time_run_sd = mean_sd(run_travel).sd;
  s.spawned_mean /= n_runs;
  s.crossings_mean /= n_runs;
  s.admitted_mean /= n_runs;
  s.entered_main_mean = entered / n_runs;
  if (steady_steps > 0) {
    const auto n = static_cast<double>(steady_steps);
    s.yhat_steady_mean = yhat / n;
    s.error_steady_mean = error / n;
    s.pi_steady_mean = pi / n;
  }
  s.class_share_steady = class_access_share(result.runs, result.classes, steady_from);
  for (auto& m : mix) m = entered > 0.0 ? m / entered : kNaN;
  s.class_mix_main = std::move(mix);
  return s;
}

std::vector<std::filesystem::path> write_suite_csv(const SuiteResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  std::size_t classes = 0;
  for (const auto& s : result.scenarios) classes = std::max(classes, class_count(s));
  const long steady_from = result.suite.steady_from;

  {
    std::vector<std::string> header = {"scenario",          "runs",
                                       "vehicles_completed", "vehicles_incomplete",
                                       "risk_self_kmh",     "risk_other_kmh",
                                       "risk_total_kmh",    "risk_total_run_sd_kmh",
                                       "travel_time_s",     "travel_time_run_sd_s",
                                       "spawned_mean",      "crossings_mean",
                                       "admitted_mean",     "entered_main_mean",
                                       "yhat_steady",       "error_steady",
                                       "pi_steady"};
    for (std::size_t c = 0; c < classes; ++c) header.push_back(fmt::format("share_c{}", c));
    for (std::size_t c = 0; c < classes; ++c) header.push_back(fmt::format("mix_c{}", c));
    CsvWriter w(dir / "summary.csv", header);
    for (const auto& scenario : result.scenarios) {
      const auto s = summarize(scenario, steady_from);
      std::vector<std::string> row = {s.label,
                                      fmt::format("{}", s.runs),
                                      fmt::format("{}", s.risk.completed),
                                      fmt::format("{}", s.risk.incomplete),
                                      csv_number(ms_to_kmh(s.risk.self)),
                                      csv_number(ms_to_kmh(s.risk.other)),
                                      csv_number(ms_to_kmh(s.risk.total())),
                                      csv_number(ms_to_kmh(s.risk_total_run_sd)),
                                      csv_number(s.travel_time_mean),
                                      csv_number(s.travel_time_run_sd),
                                      csv_number(s.spawned_mean),
                                      csv_number(s.crossings_mean),
                                      csv_number(s.admitted_mean),
                                      csv_number(s.entered_main_mean),
                                      csv_number(s.yhat_steady_mean),
                                      csv_number(s.error_steady_mean),
                                      csv_number(s.pi_steady_mean)};
      for (std::size_t c = 0; c < classes; ++c) {
        row.push_back(c < s.class_share_steady.size() ? csv_number(s.class_share_steady[c]) : std::string());
      }
      for (std::size_t c = 0; c < classes; ++c) {
        row.push_back(c < s.class_mix_main.size() ? csv_number(s.class_mix_main[c]) : std::string());
      }
      w.row(row);
    }
    written.push_back(w.path());
  }

  {
    std::vector<std::string> header = {"scenario", "step",     "runs",     "yhat_mean",    "yhat_sd",
                                       "error_mean", "error_sd", "pi_mean", "pi_sd", "admitted_mean"};
    for (std::size_t c = 0; c < classes; ++c) header.push_back(fmt::format("rate_c{}", c));
    for (std::size_t c = 0; c < classes; ++c) header.push_back(fmt::format("share_c{}", c));
    CsvWriter w(dir / "timeseries.csv", header);
    for (const auto& scenario : result.scenarios) {
      const std::size_t steps = scenario.runs.empty() ? 0 : scenario.runs.front().series.size();
      const std::size_t k_classes = class_count(scenario);
      std::vector<double> yhat, error, pi;
      for (std::size_t k = 0; k < steps; ++k) {
        yhat.clear();
        error.clear();
        pi.clear();
        double admitted = 0.0;
        std::vector<double> requests(classes, 0.0), admits(classes, 0.0);
        for (const auto& run : scenario.runs) {
          const auto& rec = run.series[k];
          yhat.push_back(rec.yhat);
          error.push_back(rec.error);
          pi.push_back(rec.pi);
          admitted += rec.admitted;
          for (std::size_t c = 0; c < k_classes; ++c) {
            requests[c] += rec.requests[c];
            admits[c] += rec.admits[c];
          }
        }
        const double n = static_cast<double>(scenario.runs.size());
        const auto y = mean_sd(yhat), e = mean_sd(error), p = mean_sd(pi);
        std::vector<std::string> row = {scenario.label,     fmt::format("{}", k), fmt::format("{}", scenario.runs.size()),
                                        csv_number(y.mean), csv_number(y.sd),     csv_number(e.mean),
                                        csv_number(e.sd),   csv_number(p.mean),   csv_number(p.sd),
                                        csv_number(admitted / n)};
        for (std::size_t c = 0; c < classes; ++c) {
          row.push_back(c < k_classes ? csv_number(60.0 * requests[c] / n) : std::string());
        }
        for (std::size_t c = 0; c < classes; ++c) {
          row.push_back(c < k_classes && requests[c] > 0.0 ? csv_number(admits[c] / requests[c]) : std::string());
        }
        w.row(row);
      }
    }
    written.push_back(w.path());
  }

  {
    CsvWriter w(dir / "vehicles.csv",
                {"scenario", "run", "id", "type", "class", "mass_kg", "v_max_kmh", "spawned_at", "requested",
                 "admitted", "entered_main", "exited_main", "travel_time_s", "risk_self_kmh", "risk_other_kmh",
                 "max_dv_self_kmh", "max_dv_other_kmh", "exceed_steps"});
    for (const auto& scenario : result.scenarios) {
      for (const auto& run : scenario.runs) {
        for (const auto& v : run.vehicles) {
          w.row({scenario.label, fmt::format("{}", run.run), fmt::format("{}", v.id.value), v.type,
                 class_cell(v, scenario.classes), csv_number(v.mass, 1), csv_number(ms_to_kmh(v.v_max_self), 3),
                 fmt::format("{}", v.spawned_at), v.requested ? "1" : "0", v.admitted ? "1" : "0",
                 optional_step(v.entered_main), optional_step(v.exited_main),
                 v.completed() ? fmt::format("{}", v.travel_time()) : std::string(),
                 csv_number(ms_to_kmh(v.risk.self)), csv_number(ms_to_kmh(v.risk.other)),
                 csv_number(ms_to_kmh(v.max_dv_self)), csv_number(ms_to_kmh(v.max_dv_other)),
                 fmt::format("{}", v.exceed_steps)});
        }
      }
    }
    written.push_back(w.path());
  }

  const bool any_traces = std::any_of(result.scenarios.begin(), result.scenarios.end(), [](const auto& s) {
    return std::any_of(s.runs.begin(), s.runs.end(), [](const auto& r) { return !r.traces.empty(); });
  });
  if (any_traces) {
    CsvWriter w(dir / "traces.csv", {"scenario", "run", "step", "id", "type", "lane", "position_m", "speed_kmh",
                                     "v_star_kmh", "binding", "dv_self_kmh", "dv_other_kmh"});
    for (const auto& scenario : result.scenarios) {
      for (const auto& run : scenario.runs) {
        std::unordered_map<std::uint64_t, const VehicleRecord*> by_id;
        for (const auto& v : run.vehicles) by_id.emplace(v.id.value, &v);
        for (const auto& t : run.traces) {
          const auto it = by_id.find(t.id.value);
          w.row({scenario.label, fmt::format("{}", run.run), fmt::format("{}", t.step),
                 fmt::format("{}", t.id.value), it == by_id.end() ? std::string() : it->second->type,
                 fmt::format("{}", t.lane), csv_number(t.position, 3), csv_number(ms_to_kmh(t.speed)),
                 csv_number(ms_to_kmh(t.v_star)), std::string(to_string(t.binding.kind)),
                 csv_number(ms_to_kmh(t.dv.self)), csv_number(ms_to_kmh(t.dv.other))});
        }
      }
    }
    written.push_back(w.path());
  }
  return written;
}

void write_injury_curves_csv(std::span<const InjuryCurve> curves, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  CsvWriter w(path, {"orientation", "level", "dv_kmh", "probability"});
  for (const auto& c : curves) {
    const auto steps = static_cast<long>(std::floor((c.valid_max_kmh - c.valid_min_kmh) / 0.5 + 1e-9));
    for (long i = 0; i <= steps; ++i) {
      const double dv_kmh = c.valid_min_kmh + 0.5 * static_cast<double>(i);
      w.row({std::string(to_string(c.orientation)), std::string(to_string(c.level)), csv_number(dv_kmh, 2),
             csv_number(injury_probability(c, kmh_to_ms(dv_kmh)), 8)});
    }
  }
}

}  // namespace momsafe
