#include "logitq/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "logitq/errors.hpp"

namespace logitq {

Band bias_band(double tau, std::size_t joint_action_count) {
  return {-tau * std::log(static_cast<double>(joint_action_count)), 0.0};
}

Band value_band(double tau, double gamma, std::size_t joint_action_count) {
  return {bias_band(tau, joint_action_count).lower / (1.0 - gamma), 0.0};
}

Band q_band(double tau, double gamma, std::size_t joint_action_count) {
  return {value_band(tau, gamma, joint_action_count).lower * gamma, 0.0};
}

double logit_bias(std::span<const double> row, double tau) {
  const auto mu = logit_distribution(row, tau);
  const double top = *std::max_element(row.begin(), row.end());
  // Every term is <= 0, so rounding cannot push the sum above zero.
  double bias = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) bias += mu[a] * (row[a] - top);
  return bias;
}

DiagnosticsRecord compute_diagnostics(const QTable& q, std::span<const double> v,
                                      const ExactSolution& exact, double tau,
                                      double gamma,
                                      std::size_t joint_action_count) {
  if (!q.same_shape(exact.q_star) || v.size() != exact.v_star.size() ||
      v.size() != q.n_states()) {
    throw ShapeError("compute_diagnostics: snapshot and solution disagree in shape");
  }
  DiagnosticsRecord d;
  d.delta_v.resize(v.size());
  d.tracking_error.resize(v.size());
  for (StateIndex s = 0; s < v.size(); ++s) {
    d.delta_v[s] = v[s] - exact.v_star[s];
    auto row = q.row(s);
    d.tracking_error[s] = v[s] - *std::max_element(row.begin(), row.end());
  }
  auto x = q.values();
  auto y = exact.q_star.values();
  d.delta_q_min = x[0] - y[0];
  d.delta_q_max = d.delta_q_min;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    d.delta_q_min = std::min(d.delta_q_min, diff);
    d.delta_q_max = std::max(d.delta_q_max, diff);
  }
  d.delta_q_sup = std::max(std::abs(d.delta_q_min), std::abs(d.delta_q_max));
  d.bias_band = bias_band(tau, joint_action_count);
  d.value_band = value_band(tau, gamma, joint_action_count);
  d.q_band = q_band(tau, gamma, joint_action_count);
  return d;
}

Band error_range(std::span<const double> tracking_error) {
  if (tracking_error.empty()) throw ShapeError("error_range: empty input");
  auto [lo, hi] = std::minmax_element(tracking_error.begin(), tracking_error.end());
  return {*lo, *hi};
}

Band deviation_envelope(std::span<const Band> history, double gamma,
                     double q_bound) {
  const std::size_t n = history.size();
  Band env{0.0, 0.0};
  // Horner form of sum_{m<n} gamma^(n-m) e_m.
  for (std::size_t m = 0; m < n; ++m) {
    env.lower = gamma * (env.lower + history[m].lower);
    env.upper = gamma * (env.upper + history[m].upper);
  }
  const double decay = std::pow(gamma, static_cast<double>(n + 1)) * q_bound;
  env.lower -= decay;
  env.upper += decay;
  return env;
}

double sup_abs_over(std::span<const double> values,
                    std::span<const std::size_t> states) {
  double m = 0.0;
  if (states.empty()) {
    for (double x : values) m = std::max(m, std::abs(x));
  } else {
    for (auto s : states) m = std::max(m, std::abs(values[s]));
  }
  return m;
}

}  // namespace logitq
