#include "logitq/game.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "logitq/errors.hpp"

namespace logitq {

JointActionCodec::JointActionCodec(std::vector<std::size_t> action_counts)
    : counts_(std::move(action_counts)), strides_(counts_.size()) {
  if (counts_.empty()) throw ConfigError("a game needs at least one agent");
  std::size_t stride = 1;
  for (std::size_t i = counts_.size(); i-- > 0;) {
    if (counts_[i] == 0) {
      throw ConfigError("agent " + std::to_string(i) + " has no actions");
    }
    strides_[i] = stride;
    stride *= counts_[i];
  }
  n_profiles_ = stride;
}

std::size_t JointActionCodec::max_action_count() const {
  return *std::max_element(counts_.begin(), counts_.end());
}

ProfileIndex JointActionCodec::encode(
    std::span<const std::size_t> actions) const {
  if (actions.size() != counts_.size()) {
    throw ShapeError("joint action has " + std::to_string(actions.size()) +
                     " components, expected " + std::to_string(counts_.size()));
  }
  ProfileIndex index = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] >= counts_[i]) {
      throw IndexError("action " + std::to_string(actions[i]) +
                       " out of range for agent " + std::to_string(i));
    }
    index += actions[i] * strides_[i];
  }
  return index;
}

std::vector<std::size_t> JointActionCodec::decode(ProfileIndex profile) const {
  if (profile >= n_profiles_) {
    throw IndexError("profile index " + std::to_string(profile) +
                     " out of range");
  }
  std::vector<std::size_t> actions(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    actions[i] = component(profile, i);
  }
  return actions;
}

double sup_norm_diff(const QTable& a, const QTable& b) {
  if (!a.same_shape(b)) throw ShapeError("sup_norm_diff: shape mismatch");
  double m = 0.0;
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

MarkovGame::MarkovGame(std::size_t n_states,
                       std::vector<std::size_t> action_counts, double discount,
                       QTable reward, std::vector<double> transition)
    : n_states_(n_states),
      codec_(std::move(action_counts)),
      discount_(discount),
      reward_(std::move(reward)),
      transition_(std::move(transition)) {
  if (n_states_ == 0) throw ConfigError("a game needs at least one state");
  if (reward_.n_states() != n_states_ ||
      reward_.n_profiles() != codec_.n_profiles()) {
    throw ShapeError("reward tensor must be n_states x n_profiles");
  }
  if (transition_.size() != n_states_ * codec_.n_profiles() * n_states_) {
    throw ShapeError("transition tensor must be n_states x n_profiles x n_states");
  }
}

MarkovGame MarkovGame::with_discount(double discount) const {
  return MarkovGame(n_states_, codec_.action_counts(), discount, reward_,
                    transition_);
}

std::vector<Violation> validate(const MarkovGame& game) {
  std::vector<Violation> out;
  const double gamma = game.discount();
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    out.push_back({"discount out of range: " + std::to_string(gamma)});
  }
  for (StateIndex s = 0; s < game.n_states(); ++s) {
    for (ProfileIndex a = 0; a < game.n_profiles(); ++a) {
      const std::string where =
          "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
      if (!std::isfinite(game.reward(s, a))) {
        out.push_back({"non-finite reward at " + where});
      }
      double total = 0.0;
      bool entries_ok = true;
      for (double p : game.transition_row(s, a)) {
        if (!(p >= 0.0 && p <= 1.0)) entries_ok = false;
        total += p;
      }
      if (!entries_ok) {
        out.push_back({"transition entry outside [0, 1] at " + where});
      }
      if (!(std::abs(total - 1.0) <= 1e-12)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "transition row at " << where << " sums to " << total;
        out.push_back({msg.str()});
      }
    }
  }
  return out;
}

void require_valid(const MarkovGame& game) {
  auto violations = validate(game);
  if (violations.empty()) return;
  std::string msg = "invalid game:";
  for (const auto& v : violations) msg += "\n  " + v.message;
  throw ConfigError(msg);
}

StateIndex sample_next_state(const MarkovGame& game, StateIndex s,
                             ProfileIndex a, Rng& rng) {
  if (s >= game.n_states()) {
    throw IndexError("state " + std::to_string(s) + " out of range");
  }
  if (a >= game.n_profiles()) {
    throw IndexError("profile " + std::to_string(a) + " out of range");
  }
  return rng.categorical(game.transition_row(s, a));
}

MarkovGame generate_random_game(const GameGenConfig& cfg) {
  if (cfg.n_states == 0) throw ConfigError("n_states must be positive");
  std::vector<std::size_t> counts = cfg.action_counts;
  if (counts.empty()) {
    if (cfg.n_agents == 0) throw ConfigError("n_agents must be positive");
    if (cfg.actions == 0) throw ConfigError("actions must be positive");
    counts.assign(cfg.n_agents, cfg.actions);
  }
  if (!(cfg.transition_low > 0.0 && cfg.transition_low <= cfg.transition_high)) {
    throw ConfigError("transition range must satisfy 0 < low <= high");
  }
  if (!(cfg.discount >= 0.0 && cfg.discount < 1.0)) {
    throw ConfigError("discount must lie in [0, 1)");
  }

  JointActionCodec codec(counts);
  const std::size_t n_s = cfg.n_states;
  const std::size_t n_a = codec.n_profiles();
  Rng rng(cfg.seed);

  std::vector<double> transition(n_s * n_a * n_s);
  for (std::size_t row = 0; row < n_s * n_a; ++row) {
    double total = 0.0;
    for (std::size_t t = 0; t < n_s; ++t) {
      double p = rng.uniform(cfg.transition_low, cfg.transition_high);
      transition[row * n_s + t] = p;
      total += p;
    }
    for (std::size_t t = 0; t < n_s; ++t) transition[row * n_s + t] /= total;
  }

  QTable reward(n_s, n_a);
  double largest = 0.0;
  for (StateIndex s = 0; s < n_s; ++s) {
    const double scale = static_cast<double>((s + 1) * (s + 1));
    for (ProfileIndex a = 0; a < n_a; ++a) {
      reward(s, a) = rng.uniform() * scale;
      largest = std::max(largest, std::abs(reward(s, a)));
    }
  }
  if (largest > 0.0) {
    for (double& r : reward.values()) r /= largest;
  }
  return MarkovGame(n_s, std::move(counts), cfg.discount, std::move(reward),
                    std::move(transition));
}

nlohmann::json game_to_json(const MarkovGame& game) {
  nlohmann::json doc;
  doc["n_agents"] = game.n_agents();
  doc["n_states"] = game.n_states();
  doc["action_counts"] = game.action_counts();
  doc["discount"] = game.discount();
  auto reward = nlohmann::json::array();
  auto transition = nlohmann::json::array();
  for (StateIndex s = 0; s < game.n_states(); ++s) {
    auto r_row = game.reward().row(s);
    reward.push_back(std::vector<double>(r_row.begin(), r_row.end()));
    auto t_state = nlohmann::json::array();
    for (ProfileIndex a = 0; a < game.n_profiles(); ++a) {
      auto p = game.transition_row(s, a);
      t_state.push_back(std::vector<double>(p.begin(), p.end()));
    }
    transition.push_back(std::move(t_state));
  }
  doc["reward"] = std::move(reward);
  doc["transition"] = std::move(transition);
  return doc;
}

namespace {

const nlohmann::json& field(const nlohmann::json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) {
    throw ConfigError(std::string("game document is missing field '") + name + "'");
  }
  return doc.at(name);
}

}  // namespace

MarkovGame game_from_json(const nlohmann::json& doc) {
  try {
    const auto n_agents = field(doc, "n_agents").get<std::size_t>();
    const auto n_states = field(doc, "n_states").get<std::size_t>();
    auto counts = field(doc, "action_counts").get<std::vector<std::size_t>>();
    const auto discount = field(doc, "discount").get<double>();
    if (counts.size() != n_agents) {
      throw ConfigError("action_counts has " + std::to_string(counts.size()) +
                        " entries but n_agents = " + std::to_string(n_agents));
    }
    JointActionCodec codec(counts);
    const std::size_t n_a = codec.n_profiles();

    const auto& r = field(doc, "reward");
    const auto& p = field(doc, "transition");
    if (!r.is_array() || r.size() != n_states || !p.is_array() ||
        p.size() != n_states) {
      throw ConfigError("reward and transition must have n_states rows");
    }
    QTable reward(n_states, n_a);
    std::vector<double> transition(n_states * n_a * n_states);
    for (StateIndex s = 0; s < n_states; ++s) {
      if (!r[s].is_array() || r[s].size() != n_a) {
        throw ConfigError("reward[" + std::to_string(s) + "] must have " +
                          std::to_string(n_a) + " entries");
      }
      if (!p[s].is_array() || p[s].size() != n_a) {
        throw ConfigError("transition[" + std::to_string(s) + "] must have " +
                          std::to_string(n_a) + " rows");
      }
      for (ProfileIndex a = 0; a < n_a; ++a) {
        reward(s, a) = r[s][a].get<double>();
        const auto& row = p[s][a];
        if (!row.is_array() || row.size() != n_states) {
          throw ConfigError("transition[" + std::to_string(s) + "][" +
                            std::to_string(a) + "] must have n_states entries");
        }
        for (StateIndex t = 0; t < n_states; ++t) {
          transition[(s * n_a + a) * n_states + t] = row[t].get<double>();
        }
      }
    }
    MarkovGame game(n_states, std::move(counts), discount, std::move(reward),
                    std::move(transition));
    require_valid(game);
    return game;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed game document: ") + e.what());
  } catch (const ShapeError& e) {
    throw ConfigError(e.what());
  }
}

MarkovGame load_game(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open game file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return game_from_json(doc);
}

void save_game(const MarkovGame& game, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << game_to_json(game).dump(1) << '\n';
}

}  // namespace logitq
