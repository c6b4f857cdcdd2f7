#include "momsafe/config_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "momsafe/units.hpp"

namespace momsafe {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Read-only view of a JSON object that remembers where it came from.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{}: expected an object", where()));
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, v] : j_.items()) {
      bool known = false;
      for (auto a : keys) known = known || k == a;
      if (!known) throw ConfigError(fmt::format("{}: unknown key '{}'", where(), k));
    }
  }

  bool has(std::string_view key) const { return j_.contains(key) && !j_.at(std::string(key)).is_null(); }

  template <class T>
  T get(std::string_view key, T fallback) const {
    return has(key) ? req<T>(key) : fallback;
  }

  template <class T>
  T req(std::string_view key) const {
    const std::string k(key);
    if (!has(key)) throw ConfigError(fmt::format("{}: missing key '{}'", where(), k));
    try {
      return j_.at(k).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("{}.{}: {}", where(), k, e.what()));
    }
  }

  Obj child(std::string_view key) const {
    const std::string k(key);
    if (!has(key)) throw ConfigError(fmt::format("{}: missing key '{}'", where(), k));
    return Obj(j_.at(k), path_ + "." + k);
  }

  std::vector<Obj> array(std::string_view key) const {
    const std::string k(key);
    std::vector<Obj> out;
    if (!has(key)) return out;
    const auto& a = j_.at(k);
    if (!a.is_array()) throw ConfigError(fmt::format("{}.{}: expected an array", where(), k));
    for (std::size_t i = 0; i < a.size(); ++i) out.emplace_back(a[i], fmt::format("{}.{}[{}]", path_, k, i));
    return out;
  }

 private:
  std::string where() const { return path_.empty() ? std::string("<root>") : path_; }

  const json& j_;
  std::string path_;
};

double kmh_out(double ms) { return std::round(ms_to_kmh(ms) * 1e9) / 1e9; }

RoadEdge read_edge(const Obj& o, const RoadEdge& fallback) {
  o.allow({"id", "length_m", "lanes", "v_limit_kmh", "v_min_kmh"});
  RoadEdge e = fallback;
  e.id = o.get<std::string>("id", e.id);
  e.length = o.get<double>("length_m", e.length);
  e.lanes = o.get<int>("lanes", e.lanes);
  e.v_limit = kmh_to_ms(o.get<double>("v_limit_kmh", ms_to_kmh(e.v_limit)));
  e.v_min = kmh_to_ms(o.get<double>("v_min_kmh", ms_to_kmh(e.v_min)));
  return e;
}

ojson write_edge(const RoadEdge& e) {
  return {{"id", e.id},
          {"length_m", e.length},
          {"lanes", e.lanes},
          {"v_limit_kmh", kmh_out(e.v_limit)},
          {"v_min_kmh", kmh_out(e.v_min)}};
}

Topology topology_from(const std::string& s) {
  if (s == "gate_fork") return Topology::gate_fork;
  if (s == "highway") return Topology::highway;
  throw ConfigError(fmt::format("network.topology: unknown value '{}' (gate_fork|highway)", s));
}

GateMode gate_mode_from(const std::string& s) {
  if (s == "off") return GateMode::off;
  if (s == "logistic") return GateMode::logistic;
  if (s == "quota") return GateMode::quota;
  throw ConfigError(fmt::format("access.mode: unknown value '{}' (off|logistic|quota)", s));
}

std::string_view to_string(Topology t) { return t == Topology::gate_fork ? "gate_fork" : "highway"; }

std::string_view to_string(GateMode m) {
  switch (m) {
    case GateMode::off: return "off";
    case GateMode::logistic: return "logistic";
    case GateMode::quota: return "quota";
  }
  return "off";
}

LogisticParams read_logistic(const Obj& o) {
  o.allow({"delta_l", "delta_u", "lambda", "pi_0"});
  return {o.req<double>("delta_l"), o.req<double>("delta_u"), o.req<double>("lambda"), o.req<double>("pi_0")};
}

SimConfig read_sim_config(const Obj& o) {
  o.allow({"name", "seed", "run_index", "duration", "network", "arrivals", "initial", "access", "speed",
           "min_gap_m", "lane_change_cooldown", "record_traces"});
  SimConfig c;
  c.name = o.get<std::string>("name", c.name);
  c.seed = o.get<std::uint64_t>("seed", c.seed);
  c.run_index = o.get<std::uint64_t>("run_index", c.run_index);
  c.duration = o.get<long>("duration", c.duration);
  c.min_gap = o.get<double>("min_gap_m", c.min_gap);
  c.lane_change_cooldown = o.get<int>("lane_change_cooldown", c.lane_change_cooldown);
  c.record_traces = o.get<bool>("record_traces", c.record_traces);

  if (o.has("network")) {
    const auto n = o.child("network");
    n.allow({"topology", "sensor_offset_m", "approach", "main", "alt"});
    c.network.topology = topology_from(n.get<std::string>("topology", "gate_fork"));
    c.network.sensor_offset = n.get<double>("sensor_offset_m", c.network.sensor_offset);
    if (n.has("approach")) c.network.approach = read_edge(n.child("approach"), c.network.approach);
    if (n.has("main")) c.network.main = read_edge(n.child("main"), c.network.main);
    if (n.has("alt")) c.network.alt = read_edge(n.child("alt"), c.network.alt);
  }

  if (o.has("arrivals")) {
    const auto a = o.child("arrivals");
    a.allow({"p_app", "types"});
    if (a.has("p_app")) c.arrivals.p_app = a.req<double>("p_app");
    for (const auto& t : a.array("types")) {
      t.allow({"name", "mass_kg", "v_max_kmh", "length_m", "accel_max", "decel_max", "rate_per_min", "weight",
               "slow_probability", "slow_v_max_kmh"});
      VehicleType v;
      v.name = t.req<std::string>("name");
      v.mass = t.req<double>("mass_kg");
      v.v_max_self = kmh_to_ms(t.req<double>("v_max_kmh"));
      v.length = t.get<double>("length_m", v.length);
      v.accel_max = t.get<double>("accel_max", v.accel_max);
      v.decel_max = t.get<double>("decel_max", v.decel_max);
      v.rate_per_min = t.get<double>("rate_per_min", v.rate_per_min);
      v.weight = t.get<double>("weight", v.weight);
      v.slow_probability = t.get<double>("slow_probability", v.slow_probability);
      v.slow_v_max = kmh_to_ms(t.get<double>("slow_v_max_kmh", 0.0));
      c.arrivals.types.push_back(std::move(v));
    }
  }

  for (const auto& iv : o.array("initial")) {
    iv.allow({"type", "lane", "position_m", "speed_kmh", "v_max_kmh"});
    InitialVehicle v;
    v.type = iv.req<std::string>("type");
    v.lane = iv.get<int>("lane", 0);
    v.position = iv.req<double>("position_m");
    v.speed = kmh_to_ms(iv.get<double>("speed_kmh", 0.0));
    if (iv.has("v_max_kmh")) v.v_max_self = kmh_to_ms(iv.req<double>("v_max_kmh"));
    c.initial.push_back(std::move(v));
  }

  if (o.has("access")) {
    const auto a = o.child("access");
    a.allow({"mode", "reference_flow", "filter_window", "gains", "classes", "quota", "quota_pool"});
    c.access.mode = gate_mode_from(a.get<std::string>("mode", "off"));
    c.access.reference_flow = a.get<double>("reference_flow", c.access.reference_flow);
    c.access.filter_window = a.get<std::size_t>("filter_window", c.access.filter_window);
    if (a.has("gains")) {
      const auto g = a.child("gains");
      g.allow({"alpha", "beta", "kappa"});
      c.access.gains.alpha = g.get<double>("alpha", c.access.gains.alpha);
      c.access.gains.beta = g.get<double>("beta", c.access.gains.beta);
      c.access.gains.kappa = g.get<double>("kappa", c.access.gains.kappa);
    }
    double lower = -std::numeric_limits<double>::infinity();
    for (const auto& k : a.array("classes")) {
      k.allow({"name", "rho_upper", "gate"});
      MomentumClass mc;
      mc.name = k.req<std::string>("name");
      mc.rho_lower = lower;
      mc.rho_upper = k.get<double>("rho_upper", std::numeric_limits<double>::infinity());
      mc.gate_params = read_logistic(k.child("gate"));
      lower = mc.rho_upper;
      c.access.classes.push_back(std::move(mc));
    }
    c.access.quota = a.get<long>("quota", c.access.quota);
    c.access.quota_pool = a.get<long>("quota_pool", c.access.quota_pool);
  }

  if (o.has("speed")) {
    const auto s = o.child("speed");
    s.allow({"enabled", "horizon_m", "dv_cap_self_kmh", "dv_cap_other_kmh", "update_period"});
    c.speed.enabled = s.get<bool>("enabled", c.speed.enabled);
    c.speed.horizon = s.get<double>("horizon_m", c.speed.horizon);
    c.speed.bounds.dv_cap_self = kmh_to_ms(s.get<double>("dv_cap_self_kmh", ms_to_kmh(c.speed.bounds.dv_cap_self)));
    c.speed.bounds.dv_cap_other =
        kmh_to_ms(s.get<double>("dv_cap_other_kmh", ms_to_kmh(c.speed.bounds.dv_cap_other)));
    c.speed.update_period = s.get<int>("update_period", c.speed.update_period);
  }
  return c;
}

ojson write_sim_config(const SimConfig& c) {
  ojson types = ojson::array();
  for (const auto& t : c.arrivals.types) {
    types.push_back({{"name", t.name},
                     {"mass_kg", t.mass},
                     {"v_max_kmh", kmh_out(t.v_max_self)},
                     {"length_m", t.length},
                     {"accel_max", t.accel_max},
                     {"decel_max", t.decel_max},
                     {"rate_per_min", t.rate_per_min},
                     {"weight", t.weight},
                     {"slow_probability", t.slow_probability},
                     {"slow_v_max_kmh", kmh_out(t.slow_v_max)}});
  }
  ojson arrivals = {{"p_app", nullptr}, {"types", types}};
  if (c.arrivals.p_app) arrivals["p_app"] = *c.arrivals.p_app;

  ojson initial = ojson::array();
  for (const auto& v : c.initial) {
    ojson j = {{"type", v.type}, {"lane", v.lane}, {"position_m", v.position}, {"speed_kmh", kmh_out(v.speed)}};
    if (v.v_max_self) j["v_max_kmh"] = kmh_out(*v.v_max_self);
    initial.push_back(std::move(j));
  }

  ojson classes = ojson::array();
  for (const auto& k : c.access.classes) {
    ojson upper = std::isinf(k.rho_upper) ? ojson(nullptr) : ojson(k.rho_upper);
    classes.push_back({{"name", k.name},
                       {"rho_upper", upper},
                       {"gate",
                        {{"delta_l", k.gate_params.delta_l},
                         {"delta_u", k.gate_params.delta_u},
                         {"lambda", k.gate_params.lambda},
                         {"pi_0", k.gate_params.pi_0}}}});
  }

  return {{"name", c.name},
          {"seed", c.seed},
          {"run_index", c.run_index},
          {"duration", c.duration},
          {"network",
           {{"topology", to_string(c.network.topology)},
            {"sensor_offset_m", c.network.sensor_offset},
            {"approach", write_edge(c.network.approach)},
            {"main", write_edge(c.network.main)},
            {"alt", write_edge(c.network.alt)}}},
          {"arrivals", arrivals},
          {"initial", initial},
          {"access",
           {{"mode", to_string(c.access.mode)},
            {"reference_flow", c.access.reference_flow},
            {"filter_window", c.access.filter_window},
            {"gains",
             {{"alpha", c.access.gains.alpha}, {"beta", c.access.gains.beta}, {"kappa", c.access.gains.kappa}}},
            {"classes", classes},
            {"quota", c.access.quota},
            {"quota_pool", c.access.quota_pool}}},
          {"speed",
           {{"enabled", c.speed.enabled},
            {"horizon_m", c.speed.horizon},
            {"dv_cap_self_kmh", kmh_out(c.speed.bounds.dv_cap_self)},
            {"dv_cap_other_kmh", kmh_out(c.speed.bounds.dv_cap_other)},
            {"update_period", c.speed.update_period}}},
          {"min_gap_m", c.min_gap},
          {"lane_change_cooldown", c.lane_change_cooldown},
          {"record_traces", c.record_traces}};
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("invalid JSON: {}", e.what()));
  }
}

}  // namespace

SimConfig parse_sim_config(std::string_view json_text) {
  const json doc = parse_document(json_text);
  SimConfig c = read_sim_config(Obj(doc, ""));
  c.validate();
  return c;
}

std::string sim_config_to_json(const SimConfig& config) { return write_sim_config(config).dump(2) + "\n"; }

ScenarioSuite parse_suite(std::string_view json_text) {
  const json doc = parse_document(json_text);
  const Obj root(doc, "");
  ScenarioSuite suite;
  if (!root.has("scenarios")) {
    SimConfig c = read_sim_config(root);
    suite.name = c.name.empty() ? "config" : c.name;
    suite.seed = c.seed;
    suite.duration = c.duration;
    suite.runs = 1;
    suite.scenarios.push_back({suite.name, std::move(c), std::nullopt});
    suite.validate();
    return suite;
  }
  root.allow({"name", "seed", "runs", "duration", "steady_from", "scenarios"});
  suite.name = root.req<std::string>("name");
  suite.seed = root.get<std::uint64_t>("seed", suite.seed);
  suite.runs = root.get<std::size_t>("runs", suite.runs);
  suite.duration = root.get<long>("duration", suite.duration);
  suite.steady_from = root.get<long>("steady_from", suite.steady_from);
  for (const auto& s : root.array("scenarios")) {
    s.allow({"label", "quota_from", "config"});
    ScenarioSpec spec;
    spec.label = s.req<std::string>("label");
    if (s.has("quota_from")) spec.quota_from = s.req<std::string>("quota_from");
    spec.config = read_sim_config(s.child("config"));
    suite.scenarios.push_back(std::move(spec));
  }
  suite.validate();
  return suite;
}

std::string suite_to_json(const ScenarioSuite& suite) {
  ojson scenarios = ojson::array();
  for (const auto& s : suite.scenarios) {
    ojson j = {{"label", s.label}, {"quota_from", nullptr}, {"config", write_sim_config(s.config)}};
    if (s.quota_from) j["quota_from"] = *s.quota_from;
    scenarios.push_back(std::move(j));
  }
  const ojson doc = {{"name", suite.name},
                     {"seed", suite.seed},
                     {"runs", suite.runs},
                     {"duration", suite.duration},
                     {"steady_from", suite.steady_from},
                     {"scenarios", scenarios}};
  return doc.dump(2) + "\n";
}

ScenarioSuite load_suite(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open {}", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_suite(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

ScenarioSuite resolve_suite(std::string_view name_or_path) {
  for (const auto& n : builtin_suite_names()) {
    if (n == name_or_path) return builtin_suite(n);
  }
  const std::filesystem::path p(name_or_path);
  if (std::filesystem::exists(p)) return load_suite(p);
  throw ConfigError(fmt::format("'{}' is neither a built-in suite ({}) nor a readable file", name_or_path,
                                fmt::join(builtin_suite_names(), ", ")));
}

}  // namespace momsafe
