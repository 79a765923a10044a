#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "logitq/game.hpp"
#include "logitq/rounds.hpp"

namespace logitq {

// Empirical model accumulated since the first stage (never reset between
// rounds).
class ModelEstimates {
 public:
  ModelEstimates(std::size_t n_states, std::size_t n_profiles)
      : n_states_(n_states), n_profiles_(n_profiles),
        reward_sum_(n_states * n_profiles, 0.0),
        visit_count_(n_states * n_profiles, 0),
        transition_count_(n_states * n_profiles * n_states, 0) {}

  std::size_t n_states() const { return n_states_; }
  std::size_t n_profiles() const { return n_profiles_; }

  // Throws NumericError on a non-finite reward, IndexError on bad indices.
  void observe(StateIndex s, ProfileIndex a, double reward, StateIndex next);

  std::uint64_t visits(StateIndex s, ProfileIndex a) const {
    return visit_count_[s * n_profiles_ + a];
  }
  std::uint64_t transitions(StateIndex s, ProfileIndex a, StateIndex next) const {
    return transition_count_[(s * n_profiles_ + a) * n_states_ + next];
  }
  double reward_sum(StateIndex s, ProfileIndex a) const {
    return reward_sum_[s * n_profiles_ + a];
  }

  // r-hat(s, a); 0 for unvisited pairs.
  double reward_estimate(StateIndex s, ProfileIndex a) const;
  // p-hat(. | s, a); uniform over states for unvisited pairs.
  std::vector<double> transition_estimate(StateIndex s, ProfileIndex a) const;

 private:
  std::size_t n_states_;
  std::size_t n_profiles_;
  std::vector<double> reward_sum_;
  std::vector<std::uint64_t> visit_count_;
  std::vector<std::uint64_t> transition_count_;
};

// r-hat(s,a) + gamma * sum_{s'} p-hat(s'|s,a) v(s').
QTable estimated_q_update(const ModelEstimates& est, std::span<const double> v,
                          double gamma);

struct ModelFreeOptions {
  // Realized stage payoff is r(s,a) + U(-reward_noise, reward_noise).
  double reward_noise = 0.0;
};

struct ModelFreeRun {
  RunRecord record;
  ModelEstimates model;
};

// Dynamics without model knowledge: Q_(1) = 0, every stage's
// (s, a, realized reward, s') feeds the model, and Q_(n+1) is built from the
// estimated model. The game only generates transitions and payoffs.
ModelFreeRun run_dynamics_model_free(const MarkovGame& game,
                                     const RoundSchedule& schedule,
                                     const RunOptions& options,
                                     const ModelFreeOptions& model_options,
                                     Rng& rng, const RunHooks& hooks = {});

}  // namespace logitq
