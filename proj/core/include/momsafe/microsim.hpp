#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "momsafe/access_control.hpp"
#include "momsafe/car_following.hpp"
#include "momsafe/domain.hpp"
#include "momsafe/lane_change.hpp"
#include "momsafe/metrics.hpp"
#include "momsafe/rng.hpp"
#include "momsafe/speed_advisory.hpp"

namespace momsafe {

enum class Topology {
  gate_fork,  // approach -> {main, alt}, gate sensor on the approach
  highway,    // a single restricted edge ("main")
};

enum class EdgeRole : int { approach = 0, main = 1, alt = 2 };

struct Network {
  Topology topology = Topology::gate_fork;
  RoadEdge approach{"approach", 250.0, 2, 50.0 / 3.6, 0.0};
  RoadEdge main{"main", 500.0, 2, 100.0 / 3.6, 0.0};
  RoadEdge alt{"alt", 500.0, 2, 100.0 / 3.6, 0.0};
  double sensor_offset = 30.0;  // m before the junction

  const RoadEdge& edge(EdgeRole r) const noexcept;
  void validate() const;
};

/// A vehicle category: static properties plus its arrival rate.
struct VehicleType {
  std::string name;
  double mass = 0.0;        // kg
  double v_max_self = 0.0;  // m/s
  double length = 4.5;
  double accel_max = 2.6;
  double decel_max = 4.5;
  double rate_per_min = 0.0;  // per-class Bernoulli arrivals (rate / 60 per step)
  double weight = 0.0;        // class mix weight when p_app is used
  double slow_probability = 0.0;  // chance a spawned vehicle gets slow_v_max instead
  double slow_v_max = 0.0;        // m/s

  void validate() const;
};

/// Arrivals at the start of the entry edge. With p_app set, one vehicle
/// appears per step with that probability and its type is drawn by weight;
/// otherwise every type runs its own Bernoulli stream at rate_per_min / 60.
struct ArrivalProcess {
  std::vector<VehicleType> types;
  std::optional<double> p_app;

  void validate() const;
};

/// A vehicle placed on the entry edge before the first step.
struct InitialVehicle {
  std::string type;
  int lane = 0;
  double position = 0.0;
  double speed = 0.0;
  std::optional<double> v_max_self;  // overrides the type's top speed
};

enum class GateMode {
  off,       // everybody enters main
  logistic,  // feedback-controlled per-class Bernoulli admission
  quota,     // uniform random thinning to a fixed number of admissions
};

struct AccessControlConfig {
  GateMode mode = GateMode::off;
  double reference_flow = 9.0;  // r, veh/min
  std::size_t filter_window = 20;
  LagController::Gains gains{};
  std::vector<MomentumClass> classes;
  // quota mode: admit exactly `quota` of the first `quota_pool` gate crossings
  long quota = 0;
  long quota_pool = 0;
};

struct SpeedControlConfig {
  bool enabled = false;
  double horizon = kDefaultSensingHorizon;  // m
  AdvisoryBounds bounds = default_advisory_bounds();
  int update_period = 1;  // steps
};

struct SimConfig {
  std::string name;
  std::uint64_t seed = 1;
  std::uint64_t run_index = 0;
  long duration = 1000;  // steps
  double step_seconds = 1.0;
  Network network{};
  ArrivalProcess arrivals{};
  std::vector<InitialVehicle> initial;
  AccessControlConfig access{};
  SpeedControlConfig speed{};
  double min_gap = kDefaultMinGap;
  int lane_change_cooldown = 3;  // steps
  bool record_traces = false;

  void validate() const;
  const VehicleType& type(std::string_view name) const;
};

/// Runtime view of one vehicle.
struct SimVehicle {
  VehicleState state;
  EdgeRole edge = EdgeRole::approach;
  std::optional<EdgeRole> next;  // decided downstream edge (approach only)
  bool decided = false;
  std::size_t type = 0;
  std::size_t class_index = 0;
  std::size_t record = 0;  // index into RunMetrics::vehicles
  double v_star = 0.0;
  Binding binding{};
  bool reference_on_main = false;
  int cooldown = 0;
};

/// Deterministic one-second-step simulator. Each step: spawn and insert
/// arrivals; gate decisions for vehicles past the sensor (with pi[k-1],
/// counted into y[k]); speed references; lane changes and car following;
/// metrics; filter and controller update with y[k].
class Simulation {
 public:
  explicit Simulation(SimConfig config);

  void step();
  void run();

  long now() const noexcept { return step_; }
  const SimConfig& config() const noexcept { return config_; }
  std::span<const SimVehicle> vehicles() const noexcept { return vehicles_; }
  const RunMetrics& metrics() const noexcept { return metrics_; }
  RunMetrics take_metrics() { return std::move(metrics_); }

  double controller_output() const noexcept { return controller_.output(); }
  double filtered_flow() const noexcept { return filter_.value(); }

  long spawned() const noexcept { return spawned_; }
  long queued() const noexcept { return static_cast<long>(queue_.size()); }
  long exited() const noexcept { return exited_; }

  /// Throws std::logic_error on overlapping vehicles, speed out of
  /// [0, v_max_self], or a broken flow balance.
  void check_invariants() const;

 private:
  struct Pending {
    std::size_t type;
    double v_max_self;
    long spawned_at;
  };

  void spawn_arrivals();
  void insert_queue();
  bool try_insert(const Pending& p);
  void gate_decisions(int& admitted_now, std::array<int, kMaxClasses>& requests,
                      std::array<int, kMaxClasses>& admits);
  void update_references();
  void change_lanes();
  void move();
  void record_metrics();

  void rebuild_lanes();
  std::vector<std::size_t>& lane_list(EdgeRole e, int lane);
  const std::vector<std::size_t>& lane_list(EdgeRole e, int lane) const;
  const RoadEdge& edge(EdgeRole e) const noexcept { return config_.network.edge(e); }

  struct Found {
    std::size_t index;
    double gap;
  };
  std::optional<Found> find_leader(const SimVehicle& v, int lane) const;
  std::optional<Found> find_follower(const SimVehicle& v, int lane) const;
  std::optional<Found> leader_in_lane(EdgeRole e, int lane, double front, std::optional<EdgeRole> next,
                                      std::size_t self) const;
  std::optional<Found> follower_in_lane(EdgeRole e, int lane, double front, double length,
                                        std::size_t self) const;

  double v_upper(const SimVehicle& v) const noexcept;
  LeaderSet leaders_on_main(const SimVehicle& v) const;
  SimVehicle make_vehicle(std::size_t type, double v_max_self, long spawned_at, int lane, double position,
                          double speed);
  std::vector<RoadOccupant> main_occupants_;

  SimConfig config_;
  long step_ = 0;
  std::uint64_t next_id_ = 1;
  RngStream arrivals_rng_;
  RngStream class_rng_;
  RngStream attribute_rng_;
  RngStream gate_rng_;
  LagController controller_;
  FlowFilter filter_;
  long quota_left_ = 0;
  long quota_pool_left_ = 0;

  std::vector<SimVehicle> vehicles_;
  std::deque<Pending> queue_;
  std::array<std::vector<std::vector<std::size_t>>, 3> lanes_;
  long spawned_ = 0;
  long exited_ = 0;
  RunMetrics metrics_;
};

/// Edge on which arrivals and initial vehicles are placed.
EdgeRole entry_edge(const Network& n) noexcept;

}  // namespace momsafe
