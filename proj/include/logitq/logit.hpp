#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "logitq/game.hpp"
#include "logitq/rng.hpp"

namespace logitq {

enum class FirstVisitRule {
  kUniformRandom,  // uniform random joint profile from the run's stream
  kFixedProfile,   // DynamicsConfig::first_profile
};

struct DynamicsConfig {
  double tau = 1e-3;
  FirstVisitRule first_visit = FirstVisitRule::kUniformRandom;
  ProfileIndex first_profile = 0;
};

// Latest joint profile played at each state (the per-agent alpha^i(s) are its
// components). Persists across rounds.
class StagePlayState {
 public:
  explicit StagePlayState(std::size_t n_states)
      : profile_(n_states, 0), initialized_(n_states, false) {}

  std::size_t n_states() const { return profile_.size(); }
  bool initialized(StateIndex s) const { return initialized_.at(s); }

  // Throws StateError if s has not been played yet.
  ProfileIndex profile(StateIndex s) const;

  void set(StateIndex s, ProfileIndex profile) {
    profile_.at(s) = profile;
    initialized_[s] = true;
  }

 private:
  std::vector<ProfileIndex> profile_;
  std::vector<bool> initialized_;
};

// Softmax over agent's own actions of Q(s, a^i, alpha^{-i}) / tau, where the
// other agents' actions are taken from `profile`. Writes into out
// (size = agent's action count).
void logit_response(std::span<const double> q_row, const JointActionCodec& codec,
                    std::size_t agent, ProfileIndex profile, double tau,
                    std::span<double> out);

// Same, reading alpha^{-i}(s) from the play state; throws StateError if s is
// unvisited.
std::vector<double> logit_response(const QTable& q, StateIndex s,
                                   std::size_t agent, const StagePlayState& play,
                                   const JointActionCodec& codec, double tau);

// Agent redraws its action by the logit response; others keep theirs.
ProfileIndex revise_profile(std::span<const double> q_row,
                            const JointActionCodec& codec, ProfileIndex profile,
                            std::size_t agent, double tau, Rng& rng);

// One play of the stage game at s. First visit plays the first-visit profile;
// afterwards a uniformly chosen agent revises by the logit response and the
// rest repeat alpha(s). Records the played profile into play and returns it.
ProfileIndex step_stage_game(const QTable& q, StateIndex s, StagePlayState& play,
                             const JointActionCodec& codec,
                             const DynamicsConfig& cfg, Rng& rng);

inline constexpr std::size_t kDefaultProfileCap = 4096;

// Transition matrix of the within-round profile chain at one state:
// P(a -> b) = sum over agents i with b^{-i} = a^{-i} of (1/n) * pi^i(b^i | a^{-i}).
// Throws SizeError when the profile count exceeds cap.
Eigen::MatrixXd transition_matrix(std::span<const double> q_row,
                                  const JointActionCodec& codec, double tau,
                                  std::size_t cap = kDefaultProfileCap);

// Softmax of the stage-game payoffs over joint profiles.
std::vector<double> stationary_closed_form(std::span<const double> q_row,
                                           double tau);

// Left fixed vector of a row-stochastic matrix via a dense LU solve with the
// normalization replacing one balance equation. Throws NumericError if the
// matrix is not row-stochastic, the system is singular, or the residual
// ||mu P - mu||_inf exceeds 1e-12.
std::vector<double> stationary_brute_force(const Eigen::MatrixXd& p);

double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace logitq
