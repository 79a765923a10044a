#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "logitq/rng.hpp"

namespace logitq {

using StateIndex = std::size_t;
// Flat index of a joint action profile (see JointActionCodec).
using ProfileIndex = std::size_t;

// Mixed-radix encoding of joint action profiles, agent 0 most significant.
class JointActionCodec {
 public:
  JointActionCodec() = default;
  explicit JointActionCodec(std::vector<std::size_t> action_counts);

  std::size_t n_agents() const { return counts_.size(); }
  std::size_t n_profiles() const { return n_profiles_; }
  std::size_t action_count(std::size_t agent) const { return counts_[agent]; }
  const std::vector<std::size_t>& action_counts() const { return counts_; }
  std::size_t max_action_count() const;

  // Multiplier of agent's component in the flat index.
  std::size_t stride(std::size_t agent) const { return strides_[agent]; }

  ProfileIndex encode(std::span<const std::size_t> actions) const;
  std::vector<std::size_t> decode(ProfileIndex profile) const;

  std::size_t component(ProfileIndex profile, std::size_t agent) const {
    return (profile / strides_[agent]) % counts_[agent];
  }

  // Same profile with agent's action replaced.
  ProfileIndex with_component(ProfileIndex profile, std::size_t agent,
                              std::size_t action) const {
    return profile - component(profile, agent) * strides_[agent] +
           action * strides_[agent];
  }

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> strides_;
  std::size_t n_profiles_ = 0;
};

// Dense (state, joint action) table of reals: rewards, Q-functions, policies.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t n_states, std::size_t n_profiles, double fill = 0.0)
      : n_states_(n_states), n_profiles_(n_profiles),
        data_(n_states * n_profiles, fill) {}

  std::size_t n_states() const { return n_states_; }
  std::size_t n_profiles() const { return n_profiles_; }

  double& operator()(StateIndex s, ProfileIndex a) {
    return data_[s * n_profiles_ + a];
  }
  double operator()(StateIndex s, ProfileIndex a) const {
    return data_[s * n_profiles_ + a];
  }

  std::span<double> row(StateIndex s) {
    return {data_.data() + s * n_profiles_, n_profiles_};
  }
  std::span<const double> row(StateIndex s) const {
    return {data_.data() + s * n_profiles_, n_profiles_};
  }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  bool same_shape(const QTable& other) const {
    return n_states_ == other.n_states_ && n_profiles_ == other.n_profiles_;
  }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t n_states_ = 0;
  std::size_t n_profiles_ = 0;
  std::vector<double> data_;
};

double sup_norm_diff(const QTable& a, const QTable& b);

// Finite identical-interest Markov game <S, A, r, p> with discount factor.
// Construction checks only tensor shapes; use validate() for the
// probabilistic invariants. Immutable after construction.
class MarkovGame {
 public:
  MarkovGame(std::size_t n_states, std::vector<std::size_t> action_counts,
             double discount, QTable reward, std::vector<double> transition);

  std::size_t n_agents() const { return codec_.n_agents(); }
  std::size_t n_states() const { return n_states_; }
  std::size_t n_profiles() const { return codec_.n_profiles(); }
  const std::vector<std::size_t>& action_counts() const {
    return codec_.action_counts();
  }
  const JointActionCodec& codec() const { return codec_; }
  double discount() const { return discount_; }

  const QTable& reward() const { return reward_; }
  double reward(StateIndex s, ProfileIndex a) const { return reward_(s, a); }

  double transition(StateIndex s, ProfileIndex a, StateIndex next) const {
    return transition_[(s * n_profiles() + a) * n_states_ + next];
  }
  std::span<const double> transition_row(StateIndex s, ProfileIndex a) const {
    return {transition_.data() + (s * n_profiles() + a) * n_states_, n_states_};
  }
  std::span<const double> transition_values() const { return transition_; }

  // Copy with a different discount factor.
  MarkovGame with_discount(double discount) const;

 private:
  std::size_t n_states_;
  JointActionCodec codec_;
  double discount_;
  QTable reward_;
  std::vector<double> transition_;
};

struct Violation {
  std::string message;
};

// Empty iff every MarkovGame invariant holds. Each entry names the offending
// index.
std::vector<Violation> validate(const MarkovGame& game);

// Throws ConfigError listing the violations, if any.
void require_valid(const MarkovGame& game);

// Draws s' ~ p(.|s, a). Throws IndexError on out-of-range s or a.
StateIndex sample_next_state(const MarkovGame& game, StateIndex s,
                             ProfileIndex a, Rng& rng);

struct GameGenConfig {
  std::size_t n_states = 5;
  std::size_t n_agents = 5;
  std::vector<std::size_t> action_counts;  // one per agent; empty means all `actions`
  std::size_t actions = 5;
  double discount = 0.6;
  double transition_low = 0.2;
  double transition_high = 1.0;
  std::uint64_t seed = 0;
};

// Random game: each transition entry uniform in [low, high] then row
// normalized; rewards uniform in [0, 1] times (s + 1)^2, then the whole tensor
// divided by its largest magnitude so that max |r(s, a)| = 1.
MarkovGame generate_random_game(const GameGenConfig& cfg);

// JSON document: n_agents, n_states, action_counts, discount,
// reward[state][profile], transition[state][profile][next_state].
nlohmann::json game_to_json(const MarkovGame& game);
// Rejects malformed documents and games failing validate() with ConfigError.
MarkovGame game_from_json(const nlohmann::json& doc);
MarkovGame load_game(const std::filesystem::path& path);
void save_game(const MarkovGame& game, const std::filesystem::path& path);

}  // namespace logitq
