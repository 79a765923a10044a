#include "logitq/rounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logitq/errors.hpp"
#include "logitq/solver.hpp"
#include "play_in_rounds.hpp"

namespace logitq {

std::uint64_t RoundSchedule::length(std::size_t round) const {
  if (round == 0 || round > round_count()) {
    throw IndexError("round " + std::to_string(round) + " outside schedule");
  }
  if (initial_round) {
    if (round == 1) return *initial_round;
    --round;
  }
  switch (growth) {
    case Growth::kConstant:
      return base_length;
    case Growth::kQuadratic:
      break;
  }
  return base_length * static_cast<std::uint64_t>(round) *
         static_cast<std::uint64_t>(round);
}

std::uint64_t RoundSchedule::total_stages() const {
  std::uint64_t total = 0;
  for (std::size_t n = 1; n <= round_count(); ++n) total += length(n);
  return total;
}

void RoundSchedule::check() const {
  if (base_length == 0) throw ConfigError("base_length must be positive");
  if (total_rounds == 0) throw ConfigError("rounds must be positive");
  if (initial_round && *initial_round == 0) {
    throw ConfigError("initial round length must be positive");
  }
}

std::string to_string(UpdateScheme scheme) {
  return scheme == UpdateScheme::kAverage ? "ave" : "freq";
}

UpdateScheme parse_scheme(const std::string& name) {
  if (name == "ave" || name == "average") return UpdateScheme::kAverage;
  if (name == "freq" || name == "most-frequent") return UpdateScheme::kMostFrequent;
  throw ConfigError("unknown update scheme '" + name + "' (expected ave or freq)");
}

void RoundEstimates::reset_counts() {
  std::fill(state_visits.begin(), state_visits.end(), 0);
  std::fill(profile_visits.begin(), profile_visits.end(), 0);
}

std::vector<double> v_average(const RoundEstimates& est,
                              std::span<const double> v_prev) {
  std::vector<double> v(v_prev.begin(), v_prev.end());
  for (StateIndex s = 0; s < est.n_states(); ++s) {
    if (est.state_visits[s] == 0) continue;
    auto q = est.q.row(s);
    auto c = est.counts(s);
    double acc = 0.0;
    for (ProfileIndex a = 0; a < q.size(); ++a) {
      if (c[a] != 0) acc += static_cast<double>(c[a]) * q[a];
    }
    v[s] = acc / static_cast<double>(est.state_visits[s]);
  }
  return v;
}

std::vector<double> v_most_frequent(const RoundEstimates& est,
                                    std::span<const double> v_prev) {
  std::vector<double> v(v_prev.begin(), v_prev.end());
  for (StateIndex s = 0; s < est.n_states(); ++s) {
    if (est.state_visits[s] == 0) continue;
    auto q = est.q.row(s);
    auto c = est.counts(s);
    const std::uint64_t top = *std::max_element(c.begin(), c.end());
    double acc = 0.0;
    std::size_t ties = 0;
    for (ProfileIndex a = 0; a < q.size(); ++a) {
      if (c[a] == top) {
        acc += q[a];
        ++ties;
      }
    }
    v[s] = acc / static_cast<double>(ties);
  }
  return v;
}

std::vector<double> update_values(UpdateScheme scheme, const RoundEstimates& est,
                                  std::span<const double> v_prev) {
  return scheme == UpdateScheme::kAverage ? v_average(est, v_prev)
                                          : v_most_frequent(est, v_prev);
}

QTable q_update(const MarkovGame& game, std::span<const double> v) {
  if (v.size() != game.n_states()) throw ShapeError("q_update: v has wrong size");
  const double gamma = game.discount();
  QTable q(game.n_states(), game.n_profiles());
  for (StateIndex s = 0; s < game.n_states(); ++s) {
    for (ProfileIndex a = 0; a < game.n_profiles(); ++a) {
      auto p = game.transition_row(s, a);
      double cont = 0.0;
      for (StateIndex t = 0; t < p.size(); ++t) cont += p[t] * v[t];
      q(s, a) = game.reward(s, a) + gamma * cont;
    }
  }
  return q;
}

std::vector<FrequencyRow> sampled_frequency(const RoundEstimates& est) {
  std::vector<FrequencyRow> out;
  for (StateIndex s = 0; s < est.n_states(); ++s) {
    const std::uint64_t visits = est.state_visits[s];
    if (visits == 0) continue;
    FrequencyRow row{s, std::vector<double>(est.n_profiles())};
    auto c = est.counts(s);
    for (ProfileIndex a = 0; a < c.size(); ++a) {
      row.frequency[a] = static_cast<double>(c[a]) / static_cast<double>(visits);
    }
    out.push_back(std::move(row));
  }
  return out;
}

namespace detail {

RoundRecord make_round_record(const RoundEstimates& est, std::uint64_t length,
                              std::uint64_t total_stages, double tau) {
  RoundRecord rec;
  rec.round = est.round_index;
  rec.round_length = length;
  rec.total_stages = total_stages;
  rec.v = est.v;
  rec.visits = est.state_visits;
  const auto maxima = state_max(est.q);
  rec.tracking_error.resize(est.n_states());
  rec.eta_tv_gap.assign(est.n_states(),
                        std::numeric_limits<double>::quiet_NaN());
  for (StateIndex s = 0; s < est.n_states(); ++s) {
    rec.tracking_error[s] = est.v[s] - maxima[s];
  }
  std::vector<double> mu(est.n_profiles());
  for (const auto& row : sampled_frequency(est)) {
    logit_distribution(est.q.row(row.state), tau, mu);
    rec.eta_tv_gap[row.state] = total_variation(row.frequency, mu);
  }
  return rec;
}

}  // namespace detail

RunRecord run_dynamics(const MarkovGame& game, const RoundSchedule& schedule,
                       const RunOptions& options, Rng& rng,
                       const RunHooks& hooks) {
  return detail::play_in_rounds(
      game, schedule, options, rng, hooks, game.reward(),
      [&game](std::span<const double> v) { return q_update(game, v); },
      [](StateIndex, ProfileIndex, StateIndex) {});
}

}  // namespace logitq
