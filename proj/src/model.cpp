#include "logitq/model.hpp"

#include <cmath>

#include "logitq/errors.hpp"
#include "play_in_rounds.hpp"

namespace logitq {

void ModelEstimates::observe(StateIndex s, ProfileIndex a, double reward,
                             StateIndex next) {
  if (!std::isfinite(reward)) throw NumericError("observe: non-finite reward");
  if (s >= n_states_ || next >= n_states_ || a >= n_profiles_) {
    throw IndexError("observe: index out of range");
  }
  const std::size_t pair = s * n_profiles_ + a;
  reward_sum_[pair] += reward;
  ++visit_count_[pair];
  ++transition_count_[pair * n_states_ + next];
}

double ModelEstimates::reward_estimate(StateIndex s, ProfileIndex a) const {
  const auto n = visits(s, a);
  return n == 0 ? 0.0 : reward_sum(s, a) / static_cast<double>(n);
}

std::vector<double> ModelEstimates::transition_estimate(StateIndex s,
                                                        ProfileIndex a) const {
  std::vector<double> p(n_states_);
  const auto n = visits(s, a);
  for (StateIndex t = 0; t < n_states_; ++t) {
    p[t] = n == 0 ? 1.0 / static_cast<double>(n_states_)
                  : static_cast<double>(transitions(s, a, t)) /
                        static_cast<double>(n);
  }
  return p;
}

QTable estimated_q_update(const ModelEstimates& est, std::span<const double> v,
                          double gamma) {
  if (v.size() != est.n_states()) {
    throw ShapeError("estimated_q_update: v has wrong size");
  }
  QTable q(est.n_states(), est.n_profiles());
  for (StateIndex s = 0; s < est.n_states(); ++s) {
    for (ProfileIndex a = 0; a < est.n_profiles(); ++a) {
      const auto p = est.transition_estimate(s, a);
      double cont = 0.0;
      for (StateIndex t = 0; t < p.size(); ++t) cont += p[t] * v[t];
      q(s, a) = est.reward_estimate(s, a) + gamma * cont;
    }
  }
  return q;
}

ModelFreeRun run_dynamics_model_free(const MarkovGame& game,
                                     const RoundSchedule& schedule,
                                     const RunOptions& options,
                                     const ModelFreeOptions& model_options,
                                     Rng& rng, const RunHooks& hooks) {
  if (!(model_options.reward_noise >= 0.0)) {
    throw ConfigError("reward noise must be non-negative");
  }
  ModelEstimates model(game.n_states(), game.n_profiles());
  const double noise = model_options.reward_noise;
  const double gamma = game.discount();
  auto record = detail::play_in_rounds(
      game, schedule, options, rng, hooks,
      QTable(game.n_states(), game.n_profiles(), 0.0),
      [&](std::span<const double> v) {
        return estimated_q_update(model, v, gamma);
      },
      [&](StateIndex s, ProfileIndex a, StateIndex next) {
        double r = game.reward(s, a);
        if (noise > 0.0) r += rng.uniform(-noise, noise);
        model.observe(s, a, r, next);
      });
  return ModelFreeRun{std::move(record), std::move(model)};
}

}  // namespace logitq
