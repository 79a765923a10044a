#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "logitq/game.hpp"
#include "logitq/solver.hpp"

namespace logitq {

struct Band {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double x, double slack = 0.0) const {
    return x >= lower - slack && x <= upper + slack;
  }
};

// Logs are natural; joint_action_count is |A| = prod_i |A^i|.
// Stationary-distribution bias of the average scheme: [-tau log|A|, 0].
Band bias_band(double tau, std::size_t joint_action_count);
// Limit band of v_(n) - v* for the average scheme: [-tau log|A| / (1-gamma), 0].
Band value_band(double tau, double gamma, std::size_t joint_action_count);
// Limit band of Q_(n) - Q*: [-tau log|A| gamma / (1-gamma), 0].
Band q_band(double tau, double gamma, std::size_t joint_action_count);

// E_{a~mu}[row(a)] - max row for mu = softmax(row / tau), summed as
// mu(a) * (row(a) - max) so the result never rounds above zero.
double logit_bias(std::span<const double> row, double tau);

struct DiagnosticsRecord {
  std::vector<double> delta_v;         // v_(n)(s) - v*(s)
  double delta_q_sup = 0.0;            // max |Q_(n) - Q*|
  double delta_q_min = 0.0;            // min (Q_(n) - Q*)
  double delta_q_max = 0.0;            // max (Q_(n) - Q*)
  std::vector<double> tracking_error;  // v_(n)(s) - max_a Q_(n)(s, a)
  Band bias_band;
  Band value_band;
  Band q_band;
};

// Throws ShapeError if q, v and the exact solution disagree in shape.
DiagnosticsRecord compute_diagnostics(const QTable& q, std::span<const double> v,
                                      const ExactSolution& exact, double tau,
                                      double gamma,
                                      std::size_t joint_action_count);

// Range [min_s e(s), max_s e(s)] of one round's tracking errors.
Band error_range(std::span<const double> tracking_error);

// Deviation envelope for delta Q after n = history.size() value updates:
//   lower = -gamma^(n+1) q_bound + sum_{m<n} gamma^(n-m) history[m].lower
//   upper =  gamma^(n+1) q_bound + sum_{m<n} gamma^(n-m) history[m].upper
// history[m] is the tracking-error range of update m (m = 0 is the update
// applied to Q = r). q_bound must dominate sup |Q*|.
Band deviation_envelope(std::span<const Band> history, double gamma, double q_bound);

// Sup over `states` of |delta_v|; all states when `states` is empty.
double sup_abs_over(std::span<const double> values,
                    std::span<const std::size_t> states = {});

}  // namespace logitq
