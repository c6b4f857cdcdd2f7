#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "momsafe/domain.hpp"
#include "momsafe/rng.hpp"

namespace momsafe {

/// First-order lag compensator
///   pi[k] = beta * pi[k-1] + kappa * (e[k] - alpha * e[k-1]).
/// beta != 1 keeps the pole off z = 1.
class LagController {
 public:
  struct Gains {
    double alpha = 0.9;
    double beta = 0.99;
    double kappa = 1.0;
  };

  LagController() : LagController(Gains{}) {}
  explicit LagController(Gains gains);

  /// Feeds e[k] and returns pi[k].
  double step(double error);

  double output() const noexcept { return pi_prev_; }
  double last_error() const noexcept { return e_prev_; }
  const Gains& gains() const noexcept { return gains_; }

  /// Steady-state ratio pi* / e* = kappa (1 - alpha) / (1 - beta).
  double dc_gain() const noexcept;

  void reset() noexcept { pi_prev_ = 0.0; e_prev_ = 0.0; }

 private:
  Gains gains_;
  double pi_prev_ = 0.0;
  double e_prev_ = 0.0;
};

/// Causal H-sample moving average turning per-step admission counts into a
/// flow in vehicles per minute (one step = one second):
///   yhat[k] = (60 / H) * sum_{j=k-H+1..k} y[j].
/// Missing history counts as zero.
class FlowFilter {
 public:
  explicit FlowFilter(std::size_t window = 20);

  double update(double y);

  double value() const noexcept;
  std::size_t window() const noexcept { return buffer_.size(); }
  void reset() noexcept;

 private:
  std::vector<double> buffer_;
  std::size_t head_ = 0;
  double sum_ = 0.0;
  double last_ = 0.0;
};

/// p_yes(pi) = delta_l + delta_u / (1 + exp(-lambda (pi - pi_0))).
double admission_probability(const LogisticParams& params, double pi) noexcept;

struct GateDecision {
  VehicleId vehicle{};
  std::size_t class_index = 0;
  double p_yes = 0.0;
  bool admitted = false;
  long step = 0;
};

/// Classifies the vehicle by its maximum momentum on `edge` and draws the
/// Bernoulli admission with the class's logistic probability at pi.
GateDecision gate_decide(const VehicleSpec& vehicle, const RoadEdge& edge,
                         std::span<const MomentumClass> classes, double pi, long step, RngStream& rng);

}  // namespace momsafe
