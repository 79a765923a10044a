#pragma once

// Small hand-built games shared by the test suites.

#include <vector>

#include "logitq/game.hpp"

namespace logitq::testing {

// 1 state, 1 agent, actions {a1, a2}, r = (1, 0), self-loop.
inline MarkovGame one_state_game(double gamma) {
  QTable r(1, 2);
  r(0, 0) = 1.0;
  r(0, 1) = 0.0;
  return MarkovGame(1, {2}, gamma, r, {1.0, 1.0});
}

// 1 state, arbitrary agents, given rewards over joint profiles.
inline MarkovGame stage_game(std::vector<std::size_t> counts,
                             const std::vector<double>& rewards, double gamma) {
  JointActionCodec codec(counts);
  QTable r(1, codec.n_profiles());
  for (ProfileIndex a = 0; a < codec.n_profiles(); ++a) r(0, a) = rewards[a];
  return MarkovGame(1, std::move(counts), gamma, r,
                    std::vector<double>(codec.n_profiles(), 1.0));
}

// 2 states, 1 agent, 2 actions: p(s1|s0,.) = 1, p(s1|s1,.) = 1.
inline MarkovGame chain_game() {
  QTable r(2, 2);
  r(0, 0) = 0.3;
  r(0, 1) = 0.1;
  r(1, 0) = 0.5;
  r(1, 1) = 1.0;
  return MarkovGame(2, {2}, 0.5, r, {0, 1, 0, 1, 0, 1, 0, 1});
}

// 4 states, 1 agent, 2 actions. States 0 and 1 are transient and feed the
// closed class {2, 3}; both actions keep the trajectory inside {2, 3}.
inline MarkovGame transient_game() {
  QTable r(4, 2);
  const double rewards[] = {0.1, 0.2, 0.3, 0.0, 0.6, 0.9, 1.0, 0.4};
  for (std::size_t i = 0; i < 8; ++i) r.values()[i] = rewards[i];
  // Rows indexed (s, a) -> distribution over 4 next states.
  std::vector<double> p = {
      0.5, 0.5, 0.0, 0.0,  // s0 a0
      0.2, 0.0, 0.8, 0.0,  // s0 a1
      0.0, 0.3, 0.0, 0.7,  // s1 a0
      0.0, 0.0, 0.5, 0.5,  // s1 a1
      0.0, 0.0, 0.1, 0.9,  // s2 a0
      0.0, 0.0, 0.6, 0.4,  // s2 a1
      0.0, 0.0, 0.7, 0.3,  // s3 a0
      0.0, 0.0, 0.2, 0.8,  // s3 a1
  };
  return MarkovGame(4, {2}, 0.6, r, std::move(p));
}

}  // namespace logitq::testing
