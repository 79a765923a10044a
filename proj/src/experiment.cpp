#include "logitq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "logitq/errors.hpp"
#include "logitq/graph.hpp"
#include "logitq/model.hpp"

namespace logitq {

std::string to_string(ModelMode mode) {
  return mode == ModelMode::kKnown ? "known" : "learned";
}

ModelMode parse_model_mode(const std::string& name) {
  if (name == "known") return ModelMode::kKnown;
  if (name == "learned") return ModelMode::kLearned;
  throw ConfigError("unknown model mode '" + name + "' (expected known or learned)");
}

MarkovGame load_game_source(const GameSource& source) {
  MarkovGame game = source.file ? load_game(*source.file)
                                : generate_random_game(source.generate);
  if (source.discount) {
    game = game.with_discount(*source.discount);
    require_valid(game);
  }
  return game;
}

RoundSchedule ExperimentConfig::schedule() const {
  RoundSchedule s;
  s.base_length = base_length;
  s.total_rounds = rounds;
  if (model == ModelMode::kLearned) s.initial_round = explore_steps;
  return s;
}

void ExperimentConfig::check() const {
  if (n_runs == 0) throw ConfigError("n_runs must be at least 1");
  if (rounds == 0) throw ConfigError("rounds must be at least 1");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (model == ModelMode::kLearned && explore_steps == 0) {
    throw ConfigError("explore_steps must be positive for the learned model");
  }
  if (!(reward_noise >= 0.0)) throw ConfigError("reward_noise must be non-negative");
  schedule().check();
}

namespace {

template <class T>
void read_if(const nlohmann::json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  try {
    if (!doc.contains("game")) throw ConfigError("experiment config needs 'game'");
    const auto& g = doc.at("game");
    if (g.contains("file")) {
      cfg.game.file = g.at("file").get<std::string>();
    } else if (g.contains("generate")) {
      const auto& gen = g.at("generate");
      auto& out = cfg.game.generate;
      read_if(gen, "n_states", out.n_states);
      read_if(gen, "n_agents", out.n_agents);
      read_if(gen, "actions", out.actions);
      read_if(gen, "action_counts", out.action_counts);
      read_if(gen, "discount", out.discount);
      read_if(gen, "transition_low", out.transition_low);
      read_if(gen, "transition_high", out.transition_high);
      read_if(gen, "seed", out.seed);
    } else {
      throw ConfigError("'game' needs either 'file' or 'generate'");
    }
    if (g.contains("discount")) cfg.game.discount = g.at("discount").get<double>();

    if (doc.contains("scheme")) cfg.scheme = parse_scheme(doc.at("scheme").get<std::string>());
    if (doc.contains("model")) cfg.model = parse_model_mode(doc.at("model").get<std::string>());
    read_if(doc, "tau", cfg.tau);
    read_if(doc, "rounds", cfg.rounds);
    read_if(doc, "base_length", cfg.base_length);
    read_if(doc, "explore_steps", cfg.explore_steps);
    read_if(doc, "n_runs", cfg.n_runs);
    read_if(doc, "seed", cfg.seed);
    read_if(doc, "threads", cfg.threads);
    read_if(doc, "reward_noise", cfg.reward_noise);
    read_if(doc, "band_slack", cfg.band_slack);
    read_if(doc, "solver_tol", cfg.solver_tol);
    if (doc.contains("output")) cfg.output = doc.at("output").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  cfg.check();
  return cfg;
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json g;
  if (cfg.game.file) {
    g["file"] = cfg.game.file->string();
  } else {
    const auto& gen = cfg.game.generate;
    g["generate"] = {{"n_states", gen.n_states},
                     {"n_agents", gen.n_agents},
                     {"actions", gen.actions},
                     {"action_counts", gen.action_counts},
                     {"discount", gen.discount},
                     {"transition_low", gen.transition_low},
                     {"transition_high", gen.transition_high},
                     {"seed", gen.seed}};
  }
  if (cfg.game.discount) g["discount"] = *cfg.game.discount;
  return {{"game", g},
          {"scheme", to_string(cfg.scheme)},
          {"model", to_string(cfg.model)},
          {"tau", cfg.tau},
          {"rounds", cfg.rounds},
          {"base_length", cfg.base_length},
          {"explore_steps", cfg.explore_steps},
          {"n_runs", cfg.n_runs},
          {"seed", cfg.seed},
          {"threads", cfg.threads},
          {"reward_noise", cfg.reward_noise},
          {"band_slack", cfg.band_slack},
          {"solver_tol", cfg.solver_tol},
          {"output", cfg.output.string()}};
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return experiment_config_from_json(doc);
}

namespace {

std::vector<StateIndex> class_of(
    const std::vector<std::vector<std::size_t>>& classes, StateIndex s,
    std::size_t n_states) {
  for (const auto& c : classes) {
    if (std::binary_search(c.begin(), c.end(), s)) return c;
  }
  // Final state transient (only possible for very short runs): use all states.
  std::vector<StateIndex> all(n_states);
  for (StateIndex t = 0; t < n_states; ++t) all[t] = t;
  return all;
}

RunResult execute_run(const ExperimentConfig& cfg, const MarkovGame& game,
                      const ExactSolution& exact, const Band& band,
                      const std::vector<std::vector<std::size_t>>& classes,
                      std::size_t run) {
  RunResult result;
  result.run = run;
  result.seed = derive_seed(cfg.seed, run);
  Rng rng(result.seed);

  RunOptions options;
  options.scheme = cfg.scheme;
  options.dynamics.tau = cfg.tau;

  const double gamma = game.discount();
  const double q_bound = exact.q_bound();
  std::vector<Band> error_history;
  RunHooks hooks;
  hooks.on_round_end = [&](const RoundSnapshot& snap) {
    auto d = compute_diagnostics(snap.q, snap.v, exact, cfg.tau, gamma,
                                 game.n_profiles());
    // Envelope for Q_(n) uses the tracking errors of rounds 1..n-1.
    const Band env = deviation_envelope(error_history, gamma, q_bound);
    constexpr double kRounding = 1e-9;
    if (cfg.model == ModelMode::kKnown &&
        (d.delta_q_min < env.lower - kRounding ||
         d.delta_q_max > env.upper + kRounding)) {
      ++result.envelope_violations;
    }
    result.envelope.push_back(env);
    error_history.push_back(error_range(d.tracking_error));
    result.diagnostics.push_back(std::move(d));
  };

  if (cfg.model == ModelMode::kKnown) {
    result.record = run_dynamics(game, cfg.schedule(), options, rng, hooks);
  } else {
    ModelFreeOptions mf;
    mf.reward_noise = cfg.reward_noise;
    result.record =
        run_dynamics_model_free(game, cfg.schedule(), options, mf, rng, hooks)
            .record;
  }

  result.recurrent_class =
      class_of(classes, result.record.final_state, game.n_states());
  const auto& last = result.diagnostics.back();
  result.final_sup_delta_v =
      sup_abs_over(last.delta_v, result.recurrent_class);
  result.final_in_band = true;
  for (auto s : result.recurrent_class) {
    if (!band.contains(last.delta_v[s], cfg.band_slack)) result.final_in_band = false;
  }
  return result;
}

}  // namespace

ExperimentBundle run_experiment(const ExperimentConfig& cfg) {
  cfg.check();
  const auto started = std::chrono::steady_clock::now();
  ExperimentBundle bundle{cfg, load_game_source(cfg.game), {}, {}, {}, {}, 0.0};
  const MarkovGame& game = bundle.game;
  bundle.exact = solve(game, {cfg.solver_tol, 1'000'000, cfg.tau});
  bundle.value_band = value_band(cfg.tau, game.discount(), game.n_profiles());
  const auto classes = recurrent_classes(build_state_graph(game));

  bundle.runs.resize(cfg.n_runs);
  std::size_t workers = cfg.threads != 0
                            ? cfg.threads
                            : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, cfg.n_runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t run = next++; run < cfg.n_runs; run = next++) {
      try {
        bundle.runs[run] =
            execute_run(cfg, game, bundle.exact, bundle.value_band, classes, run);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  const std::size_t n_rounds = cfg.schedule().round_count();
  for (std::size_t r = 0; r < n_rounds; ++r) {
    for (StateIndex s = 0; s < game.n_states(); ++s) {
      AggregateCell cell{r + 1, s, std::numeric_limits<double>::infinity(), 0.0,
                         -std::numeric_limits<double>::infinity()};
      for (const auto& run : bundle.runs) {
        const double v = run.record.rounds[r].v[s];
        cell.min = std::min(cell.min, v);
        cell.max = std::max(cell.max, v);
        cell.mean += v;
      }
      cell.mean /= static_cast<double>(bundle.runs.size());
      // Summation order can push the mean an ulp outside [min, max].
      cell.mean = std::clamp(cell.mean, cell.min, cell.max);
      bundle.aggregate.push_back(cell);
    }
  }
  bundle.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return bundle;
}

ExperimentSummary summarize(const ExperimentBundle& bundle) {
  ExperimentSummary sum;
  if (bundle.runs.empty()) throw ConfigError("no rounds");
  for (const auto& run : bundle.runs) {
    if (run.record.rounds.empty() || run.diagnostics.empty()) {
      throw ConfigError("no rounds");
    }
    sum.final_sup_delta_v.push_back(run.final_sup_delta_v);
    if (run.final_in_band) ++sum.runs_in_band;
    if (run.final_sup_delta_v <= bundle.config.band_slack) ++sum.runs_within_slack;
    sum.envelope_violations += run.envelope_violations;
    sum.total_stages += run.record.total_stages;
  }
  sum.fraction_in_band = static_cast<double>(sum.runs_in_band) /
                         static_cast<double>(bundle.runs.size());
  sum.runtime_seconds = bundle.wall_seconds;
  return sum;
}

nlohmann::json to_json(const ExperimentBundle& bundle,
                       const ExperimentSummary& summary) {
  nlohmann::json aggregate = nlohmann::json::array();
  for (const auto& c : bundle.aggregate) {
    aggregate.push_back({{"round", c.round},
                         {"state", c.state},
                         {"min", c.min},
                         {"mean", c.mean},
                         {"max", c.max}});
  }
  return {{"config", to_json(bundle.config)},
          {"v_star", bundle.exact.v_star},
          {"value_band", {bundle.value_band.lower, bundle.value_band.upper}},
          {"final_sup_delta_v", summary.final_sup_delta_v},
          {"runs_in_band", summary.runs_in_band},
          {"fraction_in_band", summary.fraction_in_band},
          {"runs_within_slack", summary.runs_within_slack},
          {"envelope_violations", summary.envelope_violations},
          {"total_stages", summary.total_stages},
          {"runtime_seconds", summary.runtime_seconds},
          {"aggregate", aggregate}};
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_csv(const ExperimentBundle& bundle, std::ostream& out) {
  const auto& cfg = bundle.config;
  out << "# logitq experiment\n"
      << "# scheme=" << to_string(cfg.scheme) << " model=" << to_string(cfg.model)
      << " tau=" << format_real(cfg.tau)
      << " gamma=" << format_real(bundle.game.discount())
      << " rounds=" << cfg.rounds << " base_length=" << cfg.base_length
      << " explore_steps=" << cfg.explore_steps << " n_runs=" << cfg.n_runs
      << " seed=" << cfg.seed << " reward_noise=" << format_real(cfg.reward_noise)
      << " joint_actions=" << bundle.game.n_profiles() << '\n'
      << "# run k seed = splitmix64(seed + (k + 1) * 0x9E3779B97F4A7C15)\n"
      << "run,round,stage_count,state,v,delta_v,tracking_error,eta_tv_gap,"
         "band_lower,band_upper,v_star\n";
  const auto& band = bundle.value_band;
  for (const auto& run : bundle.runs) {
    for (std::size_t r = 0; r < run.record.rounds.size(); ++r) {
      const auto& rec = run.record.rounds[r];
      const auto& diag = run.diagnostics[r];
      for (StateIndex s = 0; s < rec.v.size(); ++s) {
        const double v_star = bundle.exact.v_star[s];
        out << run.run << ',' << rec.round << ',' << rec.total_stages << ','
            << s << ',' << format_real(rec.v[s]) << ','
            << format_real(diag.delta_v[s]) << ','
            << format_real(rec.tracking_error[s]) << ','
            << format_real(rec.eta_tv_gap[s]) << ','
            << format_real(v_star + band.lower) << ','
            << format_real(v_star + band.upper) << ',' << format_real(v_star)
            << '\n';
      }
    }
  }
}

std::filesystem::path summary_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  if (p == csv_path) p += ".summary.json";
  return p;
}

void write_outputs(const ExperimentBundle& bundle) {
  const auto& path = bundle.config.output;
  if (path.empty()) throw ConfigError("experiment output path is empty");
  {
    std::ofstream csv(path, std::ios::binary);
    if (!csv) throw Error("cannot write " + path.string());
    write_csv(bundle, csv);
  }
  std::ofstream json(summary_path(path));
  if (!json) throw Error("cannot write " + summary_path(path).string());
  json << to_json(bundle, summarize(bundle)).dump(2) << '\n';
}

}  // namespace logitq
