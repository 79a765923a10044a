#include "logitq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logitq/errors.hpp"

namespace logitq {

namespace {

struct RowMax {
  std::vector<double> value;
  std::vector<ProfileIndex> arg;
};

RowMax row_max(const QTable& q) {
  RowMax m{std::vector<double>(q.n_states()),
           std::vector<ProfileIndex>(q.n_states())};
  for (StateIndex s = 0; s < q.n_states(); ++s) {
    auto row = q.row(s);
    auto it = std::max_element(row.begin(), row.end());
    m.value[s] = *it;
    m.arg[s] = static_cast<ProfileIndex>(it - row.begin());
  }
  return m;
}

// gamma * sum_{s'} p(s'|s,a) * x(s') for every (s, a).
QTable discounted_expectation(const MarkovGame& game,
                              std::span<const double> x) {
  QTable out(game.n_states(), game.n_profiles());
  const double gamma = game.discount();
  for (StateIndex s = 0; s < game.n_states(); ++s) {
    for (ProfileIndex a = 0; a < game.n_profiles(); ++a) {
      auto p = game.transition_row(s, a);
      double acc = 0.0;
      for (StateIndex t = 0; t < p.size(); ++t) acc += p[t] * x[t];
      out(s, a) = gamma * acc;
    }
  }
  return out;
}

double sup_abs(const QTable& q) {
  double m = 0.0;
  for (double x : q.values()) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double ExactSolution::q_bound() const {
  return sup_abs(q_star) + residual / (1.0 - discount);
}

std::vector<double> state_max(const QTable& q) { return row_max(q).value; }

QTable bellman_backup(const MarkovGame& game, const QTable& q) {
  if (q.n_states() != game.n_states() || q.n_profiles() != game.n_profiles()) {
    throw ShapeError("bellman_backup: Q must be n_states x n_profiles");
  }
  const auto v = row_max(q).value;
  QTable out = discounted_expectation(game, v);
  for (StateIndex s = 0; s < game.n_states(); ++s) {
    for (ProfileIndex a = 0; a < game.n_profiles(); ++a) {
      out(s, a) += game.reward(s, a);
    }
  }
  return out;
}

ExactSolution solve(const MarkovGame& game, const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("solve: tol must be positive");
  const double gamma = game.discount();
  const double threshold = gamma > 0.0
                               ? options.tol * (1.0 - gamma) / gamma
                               : std::numeric_limits<double>::infinity();

  // The sweep change D_k = Q_{k+1} - Q_k is propagated as
  // D_k = gamma * P * (V_k - V_{k-1}), where V_k - V_{k-1} is read off D_{k-1}
  // whenever the greedy profile at s' is unchanged. Subtracting the two
  // iterates directly loses all significant digits once D_k nears rounding
  // level, which would hide the true contraction factor.
  auto state_delta = [](const RowMax& cur, const RowMax& prev,
                        const QTable& prev_change) {
    std::vector<double> delta(cur.value.size());
    for (StateIndex t = 0; t < delta.size(); ++t) {
      delta[t] = cur.arg[t] == prev.arg[t] ? prev_change(t, cur.arg[t])
                                           : cur.value[t] - prev.value[t];
    }
    return delta;
  };

  ExactSolution sol;
  sol.tau = options.tau;
  sol.discount = gamma;

  QTable q = game.reward();
  RowMax prev_max = row_max(q);
  QTable change = discounted_expectation(game, prev_max.value);
  double last = 0.0;
  for (std::size_t it = 1;; ++it) {
    q = bellman_backup(game, q);
    last = sup_abs(change);
    sol.change_history.push_back(last);
    sol.iterations = it;
    RowMax cur_max = row_max(q);
    QTable next_change =
        discounted_expectation(game, state_delta(cur_max, prev_max, change));
    if (last <= threshold) {
      sol.residual = sup_abs(next_change);
      break;
    }
    if (it >= options.max_iters) {
      throw IterationLimitError(
          "value iteration did not converge in " +
              std::to_string(options.max_iters) + " sweeps",
          last);
    }
    prev_max = std::move(cur_max);
    change = std::move(next_change);
  }

  sol.v_star = row_max(q).value;
  sol.mu_star = QTable(q.n_states(), q.n_profiles());
  for (StateIndex s = 0; s < q.n_states(); ++s) {
    logit_distribution(q.row(s), options.tau, sol.mu_star.row(s));
  }
  sol.q_star = std::move(q);
  return sol;
}

void logit_distribution(std::span<const double> row, double tau,
                        std::span<double> out) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw NumericError("logit temperature must be positive and finite");
  }
  if (row.empty() || out.size() != row.size()) {
    throw ShapeError("logit_distribution: output size must match input");
  }
  double top = -std::numeric_limits<double>::infinity();
  for (double x : row) {
    if (!std::isfinite(x)) throw NumericError("logit_distribution: non-finite entry");
    top = std::max(top, x);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    out[i] = std::exp((row[i] - top) / tau);
    total += out[i];
  }
  for (double& x : out) x /= total;
}

std::vector<double> logit_distribution(std::span<const double> row,
                                       double tau) {
  std::vector<double> out(row.size());
  logit_distribution(row, tau, out);
  return out;
}

}  // namespace logitq
