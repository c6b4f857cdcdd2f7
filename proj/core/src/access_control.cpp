#include "momsafe/access_control.hpp"

#include <algorithm>
#include <cmath>

namespace momsafe {

LagController::LagController(Gains gains) : gains_(gains) {
  if (gains_.beta == 1.0) throw ConfigError("lag controller: beta must differ from 1");
  if (!std::isfinite(gains_.alpha) || !std::isfinite(gains_.beta) || !std::isfinite(gains_.kappa)) {
    throw ConfigError("lag controller: gains must be finite");
  }
}

double LagController::step(double error) {
  const double pi = gains_.beta * pi_prev_ + gains_.kappa * (error - gains_.alpha * e_prev_);
  pi_prev_ = pi;
  e_prev_ = error;
  return pi;
}

double LagController::dc_gain() const noexcept {
  return gains_.kappa * (1.0 - gains_.alpha) / (1.0 - gains_.beta);
}

FlowFilter::FlowFilter(std::size_t window) : buffer_(window, 0.0) {
  if (window == 0) throw ConfigError("flow filter: window must be >= 1");
}

double FlowFilter::update(double y) {
  sum_ += y - buffer_[head_];
  buffer_[head_] = y;
  head_ = (head_ + 1) % buffer_.size();
  // Recompute occasionally so rounding in the running sum cannot drift.
  if (head_ == 0) {
    sum_ = 0.0;
    for (double v : buffer_) sum_ += v;
  }
  last_ = 60.0 / static_cast<double>(buffer_.size()) * sum_;
  return last_;
}

double FlowFilter::value() const noexcept { return last_; }

void FlowFilter::reset() noexcept {
  std::fill(buffer_.begin(), buffer_.end(), 0.0);
  head_ = 0;
  sum_ = 0.0;
  last_ = 0.0;
}

double admission_probability(const LogisticParams& params, double pi) noexcept {
  return params.delta_l + params.delta_u / (1.0 + std::exp(-params.lambda * (pi - params.pi_0)));
}

GateDecision gate_decide(const VehicleSpec& vehicle, const RoadEdge& edge,
                         std::span<const MomentumClass> classes, double pi, long step, RngStream& rng) {
  GateDecision d;
  d.vehicle = vehicle.id;
  d.step = step;
  d.class_index = classify_index(rho_max(vehicle, edge), classes);
  d.p_yes = admission_probability(classes[d.class_index].gate_params, pi);
  d.admitted = rng.bernoulli(d.p_yes);
  return d;
}

}  // namespace momsafe
