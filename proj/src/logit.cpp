#include "logitq/logit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logitq/errors.hpp"
#include "logitq/solver.hpp"

namespace logitq {

ProfileIndex StagePlayState::profile(StateIndex s) const {
  if (!initialized_.at(s)) {
    throw StateError("stage game at state " + std::to_string(s) +
                     " has not been played yet");
  }
  return profile_[s];
}

void logit_response(std::span<const double> q_row, const JointActionCodec& codec,
                    std::size_t agent, ProfileIndex profile, double tau,
                    std::span<double> out) {
  const std::size_t n_actions = codec.action_count(agent);
  const std::size_t stride = codec.stride(agent);
  const ProfileIndex base = codec.with_component(profile, agent, 0);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n_actions; ++k) {
    top = std::max(top, q_row[base + k * stride]);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < n_actions; ++k) {
    out[k] = std::exp((q_row[base + k * stride] - top) / tau);
    total += out[k];
  }
  for (std::size_t k = 0; k < n_actions; ++k) out[k] /= total;
}

std::vector<double> logit_response(const QTable& q, StateIndex s,
                                   std::size_t agent, const StagePlayState& play,
                                   const JointActionCodec& codec, double tau) {
  if (!(tau > 0.0)) throw NumericError("logit temperature must be positive");
  if (agent >= codec.n_agents()) {
    throw IndexError("agent " + std::to_string(agent) + " out of range");
  }
  std::vector<double> out(codec.action_count(agent));
  logit_response(q.row(s), codec, agent, play.profile(s), tau, out);
  return out;
}

ProfileIndex revise_profile(std::span<const double> q_row,
                            const JointActionCodec& codec, ProfileIndex profile,
                            std::size_t agent, double tau, Rng& rng) {
  // Action counts are small; a fixed buffer avoids a heap allocation per stage.
  constexpr std::size_t kStackActions = 64;
  const std::size_t n_actions = codec.action_count(agent);
  double stack_buf[kStackActions];
  std::vector<double> heap_buf;
  std::span<double> probs;
  if (n_actions <= kStackActions) {
    probs = std::span<double>(stack_buf, n_actions);
  } else {
    heap_buf.resize(n_actions);
    probs = heap_buf;
  }
  logit_response(q_row, codec, agent, profile, tau, probs);
  const std::size_t action = rng.categorical(probs);
  return codec.with_component(profile, agent, action);
}

ProfileIndex step_stage_game(const QTable& q, StateIndex s, StagePlayState& play,
                             const JointActionCodec& codec,
                             const DynamicsConfig& cfg, Rng& rng) {
  ProfileIndex played;
  if (!play.initialized(s)) {
    played = cfg.first_visit == FirstVisitRule::kUniformRandom
                 ? static_cast<ProfileIndex>(rng.below(codec.n_profiles()))
                 : cfg.first_profile;
  } else {
    const std::size_t agent =
        static_cast<std::size_t>(rng.below(codec.n_agents()));
    played = revise_profile(q.row(s), codec, play.profile(s), agent, cfg.tau, rng);
  }
  play.set(s, played);
  return played;
}

Eigen::MatrixXd transition_matrix(std::span<const double> q_row,
                                  const JointActionCodec& codec, double tau,
                                  std::size_t cap) {
  const std::size_t n = codec.n_profiles();
  if (n > cap) {
    throw SizeError("transition matrix over " + std::to_string(n) +
                    " profiles exceeds cap " + std::to_string(cap));
  }
  if (q_row.size() != n) throw ShapeError("transition_matrix: row size mismatch");
  const double weight = 1.0 / static_cast<double>(codec.n_agents());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> probs(codec.max_action_count());
  for (ProfileIndex a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < codec.n_agents(); ++i) {
      std::span<double> pi(probs.data(), codec.action_count(i));
      logit_response(q_row, codec, i, a, tau, pi);
      for (std::size_t k = 0; k < pi.size(); ++k) {
        p(a, codec.with_component(a, i, k)) += weight * pi[k];
      }
    }
  }
  return p;
}

std::vector<double> stationary_closed_form(std::span<const double> q_row,
                                           double tau) {
  return logit_distribution(q_row, tau);
}

std::vector<double> stationary_brute_force(const Eigen::MatrixXd& p) {
  const Eigen::Index n = p.rows();
  if (n == 0 || p.cols() != n) throw ShapeError("stationary_brute_force: P must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p.row(i).minCoeff() < 0.0 || std::abs(p.row(i).sum() - 1.0) > 1e-12) {
      throw NumericError("stationary_brute_force: row " + std::to_string(i) +
                         " is not a probability vector");
    }
  }
  // mu (P - I) = 0  <=>  (P - I)^T mu^T = 0; the last equation is replaced by
  // sum(mu) = 1.
  Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < n) {
    throw NumericError("stationary_brute_force: chain has no unique stationary law");
  }
  Eigen::VectorXd mu = lu.solve(b);
  // One step of iterative refinement.
  mu += lu.solve(b - a * mu);

  Eigen::RowVectorXd mu_row = mu.transpose();
  const double residual = (mu_row * p - mu_row).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-12)) {
    throw NumericError("stationary_brute_force: residual " +
                       std::to_string(residual) + " above 1e-12");
  }
  return std::vector<double>(mu.data(), mu.data() + n);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("total_variation: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

}  // namespace logitq
