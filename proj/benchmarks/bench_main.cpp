#include <benchmark/benchmark.h>

#include "momsafe/car_following.hpp"
#include "momsafe/microsim.hpp"
#include "momsafe/rng.hpp"
#include "momsafe/scenarios.hpp"
#include "momsafe/speed_advisory.hpp"

namespace {

void BM_SafeSpeed(benchmark::State& state) {
  momsafe::RngStream rng(7);
  double acc = 0.0;
  for (auto _ : state) {
    const double gap = 1.0 + 200.0 * rng.uniform();
    const double u = 40.0 * rng.uniform();
    acc += momsafe::safe_speed(gap, u, 4.5, 3.5, momsafe::kDefaultMinGap);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_SafeSpeed);

void BM_SpeedReference(benchmark::State& state) {
  const auto leaders = static_cast<std::size_t>(state.range(0));
  momsafe::RngStream rng(11);
  momsafe::VehicleState follower;
  follower.spec = {momsafe::VehicleId{1}, 1500.0, 40.0, 4.5, 2.6, 4.5};
  follower.speed = 36.0;
  momsafe::LeaderSet set;
  for (std::size_t i = 0; i < leaders; ++i) {
    set.leaders.push_back({momsafe::VehicleId{i + 2}, 200.0 + 20000.0 * rng.uniform(), 30.0 * rng.uniform(),
                           1.0 + 299.0 * rng.uniform()});
  }
  const momsafe::RoadEdge edge{"main", 800.0, 3, 130.0 / 3.6, 0.0};
  const auto bounds = momsafe::default_advisory_bounds();
  for (auto _ : state) {
    benchmark::DoNotOptimize(momsafe::speed_reference(follower, set, edge, bounds));
  }
}
BENCHMARK(BM_SpeedReference)->Arg(1)->Arg(8)->Arg(32);

void BM_CombinedStep(benchmark::State& state) {
  auto suite = momsafe::combined_suite();
  auto config = suite.run_config(suite.scenarios[3], 0);
  config.duration = 1 << 30;
  momsafe::Simulation sim(config);
  for (int i = 0; i < 600; ++i) sim.step();  // fill the network
  for (auto _ : state) sim.step();
}
BENCHMARK(BM_CombinedStep);

void BM_AccessRun(benchmark::State& state) {
  const auto suite = momsafe::access_suite();
  for (auto _ : state) {
    momsafe::Simulation sim(suite.run_config(suite.scenarios[2], 0));
    sim.run();
    benchmark::DoNotOptimize(sim.metrics().gate_admitted);
  }
}
BENCHMARK(BM_AccessRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
