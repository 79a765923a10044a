#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "logitq/game.hpp"
#include "logitq/logit.hpp"
#include "logitq/rng.hpp"

namespace logitq {

// Round lengths. With growth kQuadratic, round n (1-based, counting only
// scheduled rounds) lasts base_length * n^2 stages. When initial_round is set
// it is played first, as an extra round, and the scheduled rounds follow.
struct RoundSchedule {
  enum class Growth { kQuadratic, kConstant };

  std::uint64_t base_length = 100;
  std::size_t total_rounds = 40;
  Growth growth = Growth::kQuadratic;
  std::optional<std::uint64_t> initial_round;

  std::size_t round_count() const {
    return total_rounds + (initial_round ? 1 : 0);
  }
  // Length of round `round` (1-based over round_count()).
  std::uint64_t length(std::size_t round) const;
  std::uint64_t total_stages() const;
  void check() const;
};

enum class UpdateScheme { kAverage, kMostFrequent };

std::string to_string(UpdateScheme scheme);
UpdateScheme parse_scheme(const std::string& name);  // "ave" | "freq"

// Q/v estimates for the current round plus its visit counters.
struct RoundEstimates {
  RoundEstimates() = default;
  RoundEstimates(std::size_t n_states, std::size_t n_profiles)
      : q(n_states, n_profiles), v(n_states, 0.0), state_visits(n_states, 0),
        profile_visits(n_states * n_profiles, 0) {}

  QTable q;
  std::vector<double> v;
  std::vector<std::uint64_t> state_visits;    // c_(n)(s)
  std::vector<std::uint64_t> profile_visits;  // c_(n)(s, a), row-major
  std::size_t round_index = 0;

  std::size_t n_states() const { return q.n_states(); }
  std::size_t n_profiles() const { return q.n_profiles(); }

  std::uint64_t count(StateIndex s, ProfileIndex a) const {
    return profile_visits[s * q.n_profiles() + a];
  }
  std::span<const std::uint64_t> counts(StateIndex s) const {
    return {profile_visits.data() + s * q.n_profiles(), q.n_profiles()};
  }
  void record(StateIndex s, ProfileIndex a) {
    ++state_visits[s];
    ++profile_visits[s * q.n_profiles() + a];
  }
  void reset_counts();
};

// Empirical average of Q_n over the round's plays at each state. Unvisited
// states keep v_prev.
std::vector<double> v_average(const RoundEstimates& est,
                              std::span<const double> v_prev);
// Mean of Q_n over the most frequently played profiles at each state.
// Unvisited states keep v_prev.
std::vector<double> v_most_frequent(const RoundEstimates& est,
                                    std::span<const double> v_prev);
std::vector<double> update_values(UpdateScheme scheme, const RoundEstimates& est,
                                  std::span<const double> v_prev);

// r(s,a) + gamma * sum_{s'} p(s'|s,a) v(s').
QTable q_update(const MarkovGame& game, std::span<const double> v);

struct FrequencyRow {
  StateIndex state;
  std::vector<double> frequency;
};

// Within-round sampled frequency per visited state; unvisited states omitted.
std::vector<FrequencyRow> sampled_frequency(const RoundEstimates& est);

// Plays `length` stages from state s with est.q held fixed, recording every
// (s, a) into est's counters. observe(s, a, s_next) is called after each
// stage. Returns the state after the last transition.
template <class StageObserver>
StateIndex run_round(const MarkovGame& game, RoundEstimates& est,
                     StagePlayState& play, std::uint64_t length, StateIndex s,
                     const DynamicsConfig& cfg, Rng& rng,
                     StageObserver&& observe) {
  const auto& codec = game.codec();
  for (std::uint64_t l = 0; l < length; ++l) {
    const ProfileIndex a = step_stage_game(est.q, s, play, codec, cfg, rng);
    est.record(s, a);
    const StateIndex next = sample_next_state(game, s, a, rng);
    observe(s, a, next);
    s = next;
  }
  return s;
}

inline StateIndex run_round(const MarkovGame& game, RoundEstimates& est,
                            StagePlayState& play, std::uint64_t length,
                            StateIndex s, const DynamicsConfig& cfg, Rng& rng) {
  return run_round(game, est, play, length, s, cfg, rng,
                   [](StateIndex, ProfileIndex, StateIndex) {});
}

// What a hook sees at a round boundary. At round end, q is Q_(n) (the payoffs
// played during the round) and v is v_(n) computed from the round's counts.
// At round start, v is the previous round's value (v_(n-1)).
struct RoundSnapshot {
  std::size_t round = 0;
  std::uint64_t round_length = 0;
  std::uint64_t total_stages = 0;  // cumulative; includes this round only at round end
  const QTable& q;
  std::span<const double> v;
  const RoundEstimates& estimates;
  StateIndex state = 0;  // current state of the trajectory
  double wall_seconds = 0.0;
};

struct RunHooks {
  std::function<void(const RoundSnapshot&)> on_round_start;
  std::function<void(const RoundSnapshot&)> on_round_end;
};

struct RoundRecord {
  std::size_t round = 0;
  std::uint64_t round_length = 0;
  std::uint64_t total_stages = 0;
  std::vector<double> v;
  std::vector<double> tracking_error;  // v(s) - max_a Q_n(s, a)
  std::vector<double> eta_tv_gap;      // TV(eta_n(s), mu_n(s)); NaN if unvisited
  std::vector<std::uint64_t> visits;
};

struct RunRecord {
  std::vector<RoundRecord> rounds;
  QTable final_q;
  StateIndex final_state = 0;
  std::uint64_t total_stages = 0;
  double wall_seconds = 0.0;
};

struct RunOptions {
  UpdateScheme scheme = UpdateScheme::kMostFrequent;
  DynamicsConfig dynamics;
  StateIndex initial_state = 0;
};

// Known-model dynamics: Q_(1) = r, then per round play, value update, and
// Q_(n+1) = q_update(game, v_(n)). v_(0) is the per-state max of r.
RunRecord run_dynamics(const MarkovGame& game, const RoundSchedule& schedule,
                       const RunOptions& options, Rng& rng,
                       const RunHooks& hooks = {});

}  // namespace logitq
