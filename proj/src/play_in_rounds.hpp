#pragma once

// Shared driver for the known-model and model-free dynamics.

#include <chrono>
#include <cmath>
#include <limits>

#include "logitq/errors.hpp"
#include "logitq/rounds.hpp"
#include "logitq/solver.hpp"

namespace logitq::detail {

RoundRecord make_round_record(const RoundEstimates& est, std::uint64_t length,
                              std::uint64_t total_stages, double tau);

// update_q(v_n) returns Q_(n+1); observe(s, a, s_next) sees every stage.
template <class UpdateQ, class Observer>
RunRecord play_in_rounds(const MarkovGame& game, const RoundSchedule& schedule,
                         const RunOptions& options, Rng& rng,
                         const RunHooks& hooks, QTable first_q,
                         UpdateQ&& update_q, Observer&& observe) {
  schedule.check();
  if (!(options.dynamics.tau > 0.0)) throw ConfigError("tau must be positive");
  if (options.initial_state >= game.n_states()) {
    throw IndexError("initial state out of range");
  }
  if (options.dynamics.first_visit == FirstVisitRule::kFixedProfile &&
      options.dynamics.first_profile >= game.n_profiles()) {
    throw IndexError("first-visit profile out of range");
  }
  using Clock = std::chrono::steady_clock;
  const auto started = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - started).count();
  };

  RoundEstimates est(game.n_states(), game.n_profiles());
  est.q = std::move(first_q);
  std::vector<double> v_prev = state_max(est.q);
  est.v = v_prev;
  StagePlayState play(game.n_states());
  StateIndex s = options.initial_state;

  RunRecord record;
  std::uint64_t total = 0;
  const std::size_t n_rounds = schedule.round_count();
  record.rounds.reserve(n_rounds);
  for (std::size_t round = 1; round <= n_rounds; ++round) {
    const std::uint64_t length = schedule.length(round);
    est.round_index = round;
    est.reset_counts();
    if (hooks.on_round_start) {
      hooks.on_round_start(RoundSnapshot{round, length, total, est.q, v_prev,
                                         est, s, elapsed()});
    }
    s = run_round(game, est, play, length, s, options.dynamics, rng, observe);
    total += length;
    est.v = update_values(options.scheme, est, v_prev);
    record.rounds.push_back(
        make_round_record(est, length, total, options.dynamics.tau));
    if (hooks.on_round_end) {
      hooks.on_round_end(RoundSnapshot{round, length, total, est.q, est.v, est,
                                       s, elapsed()});
    }
    v_prev = est.v;
    if (round < n_rounds) est.q = update_q(std::span<const double>(est.v));
  }
  record.final_q = std::move(est.q);
  record.final_state = s;
  record.total_stages = total;
  record.wall_seconds = elapsed();
  return record;
}

}  // namespace logitq::detail
