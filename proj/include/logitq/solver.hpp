#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "logitq/game.hpp"

namespace logitq {

// Fixed point of the joint-action Bellman operator and the logit distribution
// it induces at temperature tau.
struct ExactSolution {
  std::vector<double> v_star;
  QTable q_star;
  QTable mu_star;  // per-state softmax of q_star / tau
  double tau = 0.0;
  double discount = 0.0;
  double residual = 0.0;  // sup-norm of backup(q_star) - q_star
  std::size_t iterations = 0;
  // Sup-norm change of every sweep, ||Q_{k+1} - Q_k||, starting at Q_0 = r.
  std::vector<double> change_history;

  // Upper bound on sup |Q*| (the exact fixed point, not q_star):
  // max |q_star| + residual / (1 - discount).
  double q_bound() const;
};

struct SolveOptions {
  double tol = 1e-10;
  std::size_t max_iters = 100'000;
  double tau = 1e-3;
};

// r(s,a) + gamma * sum_{s'} p(s'|s,a) * max_{a'} Q(s',a').
QTable bellman_backup(const MarkovGame& game, const QTable& q);

// Value iteration from Q_0 = r. Stops when the sweep change is at most
// tol * (1 - gamma) / gamma, so that ||Q - Q*|| <= tol. Throws
// IterationLimitError if max_iters sweeps are not enough.
ExactSolution solve(const MarkovGame& game, const SolveOptions& options = {});

// Softmax of row / tau with max subtraction. Throws NumericError on
// non-finite input or non-positive tau.
std::vector<double> logit_distribution(std::span<const double> row, double tau);
void logit_distribution(std::span<const double> row, double tau,
                        std::span<double> out);

std::vector<double> state_max(const QTable& q);

}  // namespace logitq
