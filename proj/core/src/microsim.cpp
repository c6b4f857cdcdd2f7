#include "momsafe/microsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace momsafe {

namespace {

constexpr double kExceedTolerance = 1e-9;

}  // namespace

const RoadEdge& Network::edge(EdgeRole r) const noexcept {
  switch (r) {
    case EdgeRole::approach: return approach;
    case EdgeRole::main: return main;
    case EdgeRole::alt: return alt;
  }
  return main;
}

EdgeRole entry_edge(const Network& n) noexcept {
  return n.topology == Topology::gate_fork ? EdgeRole::approach : EdgeRole::main;
}

void Network::validate() const {
  main.validate();
  if (main.length <= main.v_limit) throw ConfigError("main edge must be longer than one step of travel");
  if (topology == Topology::highway) return;
  approach.validate();
  alt.validate();
  if (alt.length <= alt.v_limit) throw ConfigError("alt edge must be longer than one step of travel");
  if (main.lanes < approach.lanes || alt.lanes < approach.lanes) {
    throw ConfigError("main and alt need at least as many lanes as the approach");
  }
  if (!(sensor_offset > 0.0 && sensor_offset < approach.length)) {
    throw ConfigError("sensor offset must lie inside the approach edge");
  }
  if (approach.v_limit >= sensor_offset) {
    throw ConfigError(fmt::format(
        "sensor offset {} m must exceed one step of travel at the approach limit ({} m)", sensor_offset,
        approach.v_limit));
  }
}

void VehicleType::validate() const {
  if (name.empty()) throw ConfigError("vehicle type needs a name");
  VehicleSpec{{}, mass, v_max_self, length, accel_max, decel_max}.validate();
  if (!(rate_per_min >= 0.0 && rate_per_min <= 60.0)) {
    throw ConfigError(fmt::format("type '{}': rate_per_min must lie in [0, 60]", name));
  }
  if (!(weight >= 0.0)) throw ConfigError(fmt::format("type '{}': weight must be >= 0", name));
  if (!(slow_probability >= 0.0 && slow_probability <= 1.0)) {
    throw ConfigError(fmt::format("type '{}': slow_probability must lie in [0,1]", name));
  }
  if (slow_probability > 0.0 && !(slow_v_max >= 0.0)) {
    throw ConfigError(fmt::format("type '{}': slow_v_max must be >= 0", name));
  }
}

void ArrivalProcess::validate() const {
  for (std::size_t i = 0; i < types.size(); ++i) {
    types[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (types[j].name == types[i].name) {
        throw ConfigError(fmt::format("duplicate vehicle type '{}'", types[i].name));
      }
    }
  }
  if (p_app) {
    if (!(*p_app >= 0.0 && *p_app <= 1.0)) throw ConfigError("p_app must lie in [0,1]");
    const double total = std::accumulate(types.begin(), types.end(), 0.0,
                                         [](double s, const VehicleType& t) { return s + t.weight; });
    if (*p_app > 0.0 && std::abs(total - 1.0) > 1e-9) {
      throw ConfigError(fmt::format("class mix weights must sum to 1 (got {})", total));
    }
  }
}

const VehicleType& SimConfig::type(std::string_view type_name) const {
  for (const auto& t : arrivals.types) {
    if (t.name == type_name) return t;
  }
  throw ConfigError(fmt::format("unknown vehicle type '{}'", type_name));
}

void SimConfig::validate() const {
  if (duration < 0) throw ConfigError("duration must be >= 0");
  if (step_seconds != 1.0) throw ConfigError("the simulator runs with a fixed 1 s step");
  network.validate();
  arrivals.validate();
  const RoadEdge& entry = network.edge(entry_edge(network));
  for (const auto& iv : initial) {
    const auto& t = type(iv.type);
    if (iv.lane < 0 || iv.lane >= entry.lanes) throw ConfigError("initial vehicle lane out of range");
    if (!(iv.position >= 0.0 && iv.position <= entry.length)) {
      throw ConfigError("initial vehicle position outside the entry edge");
    }
    const double vmax = iv.v_max_self.value_or(t.v_max_self);
    if (!(vmax >= 0.0)) throw ConfigError("initial vehicle top speed must be >= 0");
    if (!(iv.speed >= 0.0 && iv.speed <= vmax)) {
      throw ConfigError("initial vehicle speed must lie in [0, top speed]");
    }
  }
  if (!access.classes.empty()) validate_classes(access.classes);
  if (access.classes.size() > kMaxClasses) {
    throw ConfigError(fmt::format("at most {} momentum classes are supported", kMaxClasses));
  }
  if (access.mode == GateMode::logistic && access.classes.empty()) {
    throw ConfigError("logistic gate needs momentum classes");
  }
  if (access.mode != GateMode::off && network.topology != Topology::gate_fork) {
    throw ConfigError("access control needs the gate_fork topology");
  }
  if (access.filter_window == 0) throw ConfigError("filter window must be >= 1");
  if (access.gains.beta == 1.0) throw ConfigError("lag controller: beta must differ from 1");
  if (access.quota < 0 || access.quota > access.quota_pool) {
    throw ConfigError("quota must lie in [0, quota_pool]");
  }
  if (!(speed.horizon > 0.0)) throw ConfigError("sensing horizon must be > 0");
  speed.bounds.validate();
  if (speed.update_period < 1) throw ConfigError("speed update period must be >= 1 step");
  if (!(min_gap > 0.0)) throw ConfigError("min_gap must be > 0");
  if (lane_change_cooldown < 0) throw ConfigError("lane_change_cooldown must be >= 0");
}

Simulation::Simulation(SimConfig config)
    : config_(std::move(config)),
      arrivals_rng_(RngStream::derive(config_.seed, "arrivals", config_.run_index)),
      class_rng_(RngStream::derive(config_.seed, "class", config_.run_index)),
      attribute_rng_(RngStream::derive(config_.seed, "attributes", config_.run_index)),
      gate_rng_(RngStream::derive(config_.seed, "gate", config_.run_index)),
      controller_(config_.access.gains),
      filter_(config_.access.filter_window) {
  config_.validate();
  quota_left_ = config_.access.quota;
  quota_pool_left_ = config_.access.quota_pool;
  metrics_.scenario = config_.name;
  metrics_.run = config_.run_index;

  for (EdgeRole e : {EdgeRole::approach, EdgeRole::main, EdgeRole::alt}) {
    lanes_[static_cast<int>(e)].resize(static_cast<std::size_t>(edge(e).lanes));
  }

  for (const auto& iv : config_.initial) {
    const auto& t = config_.type(iv.type);
    const auto type_index = static_cast<std::size_t>(&t - config_.arrivals.types.data());
    vehicles_.push_back(
        make_vehicle(type_index, iv.v_max_self.value_or(t.v_max_self), 0, iv.lane, iv.position, iv.speed));
    ++spawned_;
  }
  rebuild_lanes();
  check_invariants();
}

SimVehicle Simulation::make_vehicle(std::size_t type, double v_max_self, long spawned_at, int lane,
                                    double position, double speed) {
  const auto& t = config_.arrivals.types[type];
  SimVehicle v;
  v.state.spec = {VehicleId{next_id_++}, t.mass, v_max_self, t.length, t.accel_max, t.decel_max};
  v.state.lane = lane;
  v.state.position = position;
  v.state.speed = speed;
  v.state.entered_at = step_;
  v.edge = entry_edge(config_.network);
  v.type = type;
  if (!config_.access.classes.empty()) {
    v.class_index = classify_index(rho_max(v.state.spec, config_.network.main), config_.access.classes);
  }
  v.v_star = v_upper(v);

  VehicleRecord rec;
  rec.id = v.state.spec.id;
  rec.type = t.name;
  rec.class_index = v.class_index;
  rec.mass = t.mass;
  rec.v_max_self = v_max_self;
  rec.spawned_at = spawned_at;
  if (v.edge == EdgeRole::main) {
    rec.entered_main = step_;
    rec.admitted = true;
  }
  v.record = metrics_.vehicles.size();
  metrics_.vehicles.push_back(std::move(rec));
  return v;
}

double Simulation::v_upper(const SimVehicle& v) const noexcept {
  return std::min(edge(v.edge).v_limit, v.state.spec.v_max_self);
}

void Simulation::run() {
  while (step_ < config_.duration) step();
}

void Simulation::step() {
  std::array<int, kMaxClasses> requests{};
  std::array<int, kMaxClasses> admits{};
  int admitted_now = 0;

  spawn_arrivals();
  insert_queue();
  rebuild_lanes();
  if (config_.network.topology == Topology::gate_fork) gate_decisions(admitted_now, requests, admits);
  update_references();
  change_lanes();
  move();
  rebuild_lanes();
  record_metrics();

  const double yhat = filter_.update(static_cast<double>(admitted_now));
  const double error = config_.access.reference_flow - yhat;
  const double pi = controller_.step(error);

  StepRecord rec;
  rec.step = step_;
  rec.admitted = admitted_now;
  rec.yhat = yhat;
  rec.error = error;
  rec.pi = pi;
  rec.requests = requests;
  rec.admits = admits;
  rec.spawned = spawned_;
  rec.queued = queued();
  rec.on_network = static_cast<long>(vehicles_.size());
  rec.exited = exited_;
  metrics_.series.push_back(std::move(rec));

  check_invariants();
  ++step_;
}

void Simulation::spawn_arrivals() {
  const auto& types = config_.arrivals.types;
  auto enqueue = [&](std::size_t t) {
    double vmax = types[t].v_max_self;
    if (types[t].slow_probability > 0.0 && attribute_rng_.bernoulli(types[t].slow_probability)) {
      vmax = types[t].slow_v_max;
    }
    queue_.push_back({t, vmax, step_});
    ++spawned_;
  };
  if (config_.arrivals.p_app) {
    if (arrivals_rng_.bernoulli(*config_.arrivals.p_app)) {
      const double u = class_rng_.uniform();
      double acc = 0.0;
      std::size_t pick = types.size() - 1;
      for (std::size_t t = 0; t < types.size(); ++t) {
        acc += types[t].weight;
        if (u < acc) {
          pick = t;
          break;
        }
      }
      enqueue(pick);
    }
  } else {
    for (std::size_t t = 0; t < types.size(); ++t) {
      if (arrivals_rng_.bernoulli(types[t].rate_per_min / 60.0)) enqueue(t);
    }
  }
}

void Simulation::insert_queue() {
  rebuild_lanes();
  while (!queue_.empty() && try_insert(queue_.front())) queue_.pop_front();
}

bool Simulation::try_insert(const Pending& p) {
  const EdgeRole e = entry_edge(config_.network);
  const auto& t = config_.arrivals.types[p.type];
  const double upper = std::min(edge(e).v_limit, p.v_max_self);
  int best_lane = -1;
  double best_speed = -1.0;
  for (int lane = 0; lane < edge(e).lanes; ++lane) {
    const auto& list = lane_list(e, lane);
    double v0 = upper;
    if (!list.empty()) {
      const auto& lead = vehicles_[list.front()].state;
      const double gap = lead.position - lead.spec.length;
      if (gap < config_.min_gap) continue;
      v0 = std::min(upper, safe_speed(gap, lead.speed, lead.spec.decel_max, t.decel_max, config_.min_gap));
    }
    if (v0 > best_speed) {
      best_speed = v0;
      best_lane = lane;
    }
  }
  if (best_lane < 0) return false;
  vehicles_.push_back(make_vehicle(p.type, p.v_max_self, p.spawned_at, best_lane, 0.0, best_speed));
  auto& list = lane_list(e, best_lane);
  list.insert(list.begin(), vehicles_.size() - 1);
  return true;
}

void Simulation::gate_decisions(int& admitted_now, std::array<int, kMaxClasses>& requests,
                                std::array<int, kMaxClasses>& admits) {
  const auto& net = config_.network;
  const double sensor = net.approach.length - net.sensor_offset;
  for (auto& v : vehicles_) {
    if (v.edge != EdgeRole::approach || v.decided || v.state.position < sensor) continue;
    auto& rec = metrics_.vehicles[v.record];
    bool admitted = true;
    switch (config_.access.mode) {
      case GateMode::off:
        break;
      case GateMode::logistic: {
        const auto d = gate_decide(v.state.spec, net.main, config_.access.classes, controller_.output(), step_,
                                   gate_rng_);
        admitted = d.admitted;
        break;
      }
      case GateMode::quota:
        // Selection sampling: a uniformly random `quota`-subset of the pool.
        if (quota_pool_left_ > 0) {
          admitted = gate_rng_.uniform() * static_cast<double>(quota_pool_left_) <
                     static_cast<double>(quota_left_);
          --quota_pool_left_;
          if (admitted) --quota_left_;
        } else {
          admitted = false;
        }
        break;
    }
    v.decided = true;
    v.next = admitted ? EdgeRole::main : EdgeRole::alt;
    rec.requested = true;
    rec.admitted = admitted;
    ++requests[v.class_index];
    ++metrics_.gate_crossings;
    if (admitted) {
      ++admits[v.class_index];
      ++admitted_now;
      ++metrics_.gate_admitted;
    }
  }
}

LeaderSet Simulation::leaders_on_main(const SimVehicle& v) const {
  const RoadOccupant self{v.state.spec.id, v.state.spec.mass, v.state.position, v.state.speed};
  return build_leader_set(self, main_occupants_, config_.speed.horizon);
}

void Simulation::update_references() {
  main_occupants_.clear();
  for (const auto& v : vehicles_) {
    if (v.edge == EdgeRole::main) {
      main_occupants_.push_back({v.state.spec.id, v.state.spec.mass, v.state.position, v.state.speed});
    }
  }
  const bool refresh = step_ % config_.speed.update_period == 0;
  for (auto& v : vehicles_) {
    if (config_.speed.enabled && v.edge == EdgeRole::main) {
      if (refresh || !v.reference_on_main) {
        const auto ref = speed_reference(v.state, leaders_on_main(v), config_.network.main, config_.speed.bounds);
        v.v_star = ref.v_star;
        v.binding = ref.binding;
        v.reference_on_main = true;
      }
      continue;
    }
    v.v_star = v_upper(v);
    v.binding = {edge(v.edge).v_limit <= v.state.spec.v_max_self ? BindingKind::road_max : BindingKind::self_max,
                 {}};
  }
}

void Simulation::change_lanes() {
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    auto& v = vehicles_[i];
    if (v.cooldown > 0) {
      --v.cooldown;
      continue;
    }
    const int lanes = edge(v.edge).lanes;
    if (lanes < 2) continue;

    Surroundings s;
    s.lane = v.state.lane;
    s.lanes = lanes;
    s.speed = v.state.speed;
    s.desired_speed = v.v_star;
    s.decel = v.state.spec.decel_max;
    s.lookahead = config_.speed.horizon;
    s.min_gap = config_.min_gap;
    auto as_neighbour = [&](const std::optional<Found>& f) -> std::optional<Neighbour> {
      if (!f) return std::nullopt;
      const auto& o = vehicles_[f->index].state;
      return Neighbour{f->gap, o.speed, o.spec.decel_max};
    };
    s.leader = as_neighbour(find_leader(v, s.lane));
    if (s.lane + 1 < lanes) {
      s.left_leader = as_neighbour(find_leader(v, s.lane + 1));
      s.left_follower = as_neighbour(find_follower(v, s.lane + 1));
    }
    if (s.lane > 0) {
      s.right_leader = as_neighbour(find_leader(v, s.lane - 1));
      s.right_follower = as_neighbour(find_follower(v, s.lane - 1));
    }
    const LaneChange decision = lane_change_decide(s);
    if (decision == LaneChange::stay) continue;

    const int target = decision == LaneChange::move_left ? s.lane + 1 : s.lane - 1;
    auto& from = lane_list(v.edge, s.lane);
    from.erase(std::find(from.begin(), from.end(), i));
    auto& to = lane_list(v.edge, target);
    auto pos = std::upper_bound(to.begin(), to.end(), v.state.position, [&](double p, std::size_t j) {
      return p < vehicles_[j].state.position;
    });
    to.insert(pos, i);
    v.state.lane = target;
    v.cooldown = config_.lane_change_cooldown;
  }
}

void Simulation::move() {
  std::vector<double> next_speed(vehicles_.size());
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    const auto& v = vehicles_[i];
    std::optional<LeaderGap> leader;
    if (auto f = find_leader(v, v.state.lane)) {
      const auto& o = vehicles_[f->index].state;
      leader = LeaderGap{f->gap, o.speed, o.spec.decel_max};
    }
    next_speed[i] = car_following_update(v.state, leader, v.v_star, config_.min_gap).speed;
  }

  std::vector<SimVehicle> staying;
  staying.reserve(vehicles_.size());
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    auto& v = vehicles_[i];
    v.state.speed = next_speed[i];
    v.state.position += next_speed[i] * config_.step_seconds;
    const double length = edge(v.edge).length;
    if (v.state.position > length) {
      if (v.edge == EdgeRole::approach) {
        if (!v.next) throw std::logic_error(fmt::format("vehicle {} reached the junction undecided", v.state.spec.id.value));
        v.state.position -= length;
        v.edge = *v.next;
        v.next.reset();
        v.state.entered_at = step_;
        if (v.edge == EdgeRole::main) {
          metrics_.vehicles[v.record].entered_main = step_;
          v.reference_on_main = false;
        }
      } else {
        v.state.exited_at = step_;
        if (v.edge == EdgeRole::main) metrics_.vehicles[v.record].exited_main = step_;
        ++exited_;
        continue;
      }
    }
    staying.push_back(std::move(v));
  }
  vehicles_ = std::move(staying);
}

void Simulation::record_metrics() {
  main_occupants_.clear();
  for (const auto& v : vehicles_) {
    if (v.edge == EdgeRole::main) {
      main_occupants_.push_back({v.state.spec.id, v.state.spec.mass, v.state.position, v.state.speed});
    }
  }
  for (const auto& v : vehicles_) {
    if (v.edge != EdgeRole::main) continue;
    const auto dv = dv_snapshot(v.state.spec.mass, v.state.speed, leaders_on_main(v));
    auto& rec = metrics_.vehicles[v.record];
    const auto e = exceedance_of(dv, config_.speed.bounds);
    rec.risk.self += e.self;
    rec.risk.other += e.other;
    rec.max_dv_self = std::max(rec.max_dv_self, dv.self);
    rec.max_dv_other = std::max(rec.max_dv_other, dv.other);
    if (e.self > kExceedTolerance || e.other > kExceedTolerance) ++rec.exceed_steps;
    if (config_.record_traces) {
      metrics_.traces.push_back(
          {step_, v.state.spec.id, v.state.lane, v.state.position, v.state.speed, v.v_star, v.binding, dv});
    }
  }
}

void Simulation::rebuild_lanes() {
  for (auto& per_edge : lanes_) {
    for (auto& list : per_edge) list.clear();
  }
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    lane_list(vehicles_[i].edge, vehicles_[i].state.lane).push_back(i);
  }
  for (auto& per_edge : lanes_) {
    for (auto& list : per_edge) {
      std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
        const double pa = vehicles_[a].state.position;
        const double pb = vehicles_[b].state.position;
        return pa != pb ? pa < pb : a < b;
      });
    }
  }
}

std::vector<std::size_t>& Simulation::lane_list(EdgeRole e, int lane) {
  return lanes_[static_cast<int>(e)][static_cast<std::size_t>(lane)];
}

const std::vector<std::size_t>& Simulation::lane_list(EdgeRole e, int lane) const {
  return lanes_[static_cast<int>(e)][static_cast<std::size_t>(lane)];
}

std::optional<Simulation::Found> Simulation::find_leader(const SimVehicle& v, int lane) const {
  const auto self = static_cast<std::size_t>(&v - vehicles_.data());
  std::optional<EdgeRole> next = v.next;
  return leader_in_lane(v.edge, lane, v.state.position, next, self);
}

std::optional<Simulation::Found> Simulation::find_follower(const SimVehicle& v, int lane) const {
  const auto self = static_cast<std::size_t>(&v - vehicles_.data());
  return follower_in_lane(v.edge, lane, v.state.position, v.state.spec.length, self);
}

std::optional<Simulation::Found> Simulation::leader_in_lane(EdgeRole e, int lane, double front,
                                                            std::optional<EdgeRole> next,
                                                            std::size_t self) const {
  const auto& list = lane_list(e, lane);
  auto it = std::lower_bound(list.begin(), list.end(), front,
                             [&](std::size_t j, double p) { return vehicles_[j].state.position < p; });
  for (; it != list.end(); ++it) {
    if (*it == self) continue;
    const auto& o = vehicles_[*it].state;
    return Found{*it, o.position - o.spec.length - front};
  }
  if (e != EdgeRole::approach || config_.network.topology != Topology::gate_fork) return std::nullopt;

  // Look across the junction: the decided downstream edge, or both while undecided.
  std::optional<Found> best;
  const double to_end = edge(e).length - front;
  for (EdgeRole d : {EdgeRole::main, EdgeRole::alt}) {
    if (next && *next != d) continue;
    const auto& down = lane_list(d, lane);
    if (down.empty()) continue;
    const auto& o = vehicles_[down.front()].state;
    const double gap = to_end + o.position - o.spec.length;
    if (!best || gap < best->gap) best = Found{down.front(), gap};
  }
  return best;
}

std::optional<Simulation::Found> Simulation::follower_in_lane(EdgeRole e, int lane, double front, double length,
                                                              std::size_t self) const {
  const auto& list = lane_list(e, lane);
  auto it = std::lower_bound(list.begin(), list.end(), front,
                             [&](std::size_t j, double p) { return vehicles_[j].state.position < p; });
  while (it != list.begin()) {
    --it;
    if (*it == self) continue;
    return Found{*it, front - length - vehicles_[*it].state.position};
  }
  if (e == EdgeRole::approach || config_.network.topology != Topology::gate_fork) return std::nullopt;
  if (lane >= edge(EdgeRole::approach).lanes) return std::nullopt;

  const auto& up = lane_list(EdgeRole::approach, lane);
  for (auto rit = up.rbegin(); rit != up.rend(); ++rit) {
    const auto& o = vehicles_[*rit];
    if (o.next && *o.next != e) continue;
    return Found{*rit, edge(EdgeRole::approach).length - o.state.position + front - length};
  }
  return std::nullopt;
}

void Simulation::check_invariants() const {
  if (spawned_ != queued() + static_cast<long>(vehicles_.size()) + exited_) {
    throw std::logic_error(fmt::format("flow balance broken at step {}: spawned {} != queued {} + active {} + exited {}",
                                       step_, spawned_, queued(), vehicles_.size(), exited_));
  }
  for (const auto& v : vehicles_) {
    if (v.state.speed < 0.0 || v.state.speed > v.state.spec.v_max_self + 1e-9) {
      throw std::logic_error(fmt::format("vehicle {} speed {} outside [0, {}]", v.state.spec.id.value,
                                         v.state.speed, v.state.spec.v_max_self));
    }
  }
  auto overlap = [&](std::size_t follower, std::size_t leader, double offset) {
    const auto& f = vehicles_[follower].state;
    const auto& l = vehicles_[leader].state;
    const double gap = offset + l.position - l.spec.length - f.position;
    if (!(gap > 0.0)) {
      throw std::logic_error(fmt::format("vehicles {} and {} overlap (gap {:.3f} m) at step {}", f.spec.id.value,
                                         l.spec.id.value, gap, step_));
    }
  };
  for (EdgeRole e : {EdgeRole::approach, EdgeRole::main, EdgeRole::alt}) {
    for (int lane = 0; lane < edge(e).lanes; ++lane) {
      const auto& list = lane_list(e, lane);
      for (std::size_t k = 1; k < list.size(); ++k) overlap(list[k - 1], list[k], 0.0);
    }
  }
  if (config_.network.topology != Topology::gate_fork) return;
  const double approach_len = edge(EdgeRole::approach).length;
  for (int lane = 0; lane < edge(EdgeRole::approach).lanes; ++lane) {
    const auto& up = lane_list(EdgeRole::approach, lane);
    for (EdgeRole d : {EdgeRole::main, EdgeRole::alt}) {
      const auto& down = lane_list(d, lane);
      if (down.empty()) continue;
      for (auto rit = up.rbegin(); rit != up.rend(); ++rit) {
        const auto& o = vehicles_[*rit];
        if (o.next && *o.next != d) continue;
        overlap(*rit, down.front(), approach_len);
        break;
      }
    }
  }
}

}  // namespace momsafe
