// logitq: command-line front end for the logit-Q learning library.
//
// Exit codes: 0 success, 1 invalid flags or inputs, 2 runtime failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "logitq/errors.hpp"
#include "logitq/experiment.hpp"
#include "logitq/game.hpp"
#include "logitq/graph.hpp"
#include "logitq/logit.hpp"
#include "logitq/solver.hpp"

namespace {

using namespace logitq;
using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool verbose = false;
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw Error("cannot write " + out_path);
  out << text;
}

json rows_to_json(const QTable& t) {
  json rows = json::array();
  for (StateIndex s = 0; s < t.n_states(); ++s) {
    auto r = t.row(s);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  GameGenConfig gen;
  std::string out;
};

void add_generate(CLI::App& app, GenerateArgs& args) {
  auto* cmd = app.add_subcommand("generate", "Write a random game as JSON");
  cmd->add_option("--states", args.gen.n_states, "Number of states")->capture_default_str();
  cmd->add_option("--agents", args.gen.n_agents, "Number of agents")->capture_default_str();
  cmd->add_option("--actions", args.gen.actions, "Actions per agent")->capture_default_str();
  cmd->add_option("--gamma", args.gen.discount, "Discount factor")->capture_default_str();
  cmd->add_option("--low", args.gen.transition_low, "Transition entry lower bound")->capture_default_str();
  cmd->add_option("--high", args.gen.transition_high, "Transition entry upper bound")->capture_default_str();
  cmd->add_option("--out", args.out, "Output path")->required();
}

int run_generate(GenerateArgs& args, const Globals& g) {
  args.gen.seed = g.seed;
  save_game(generate_random_game(args.gen), args.out);
  return 0;
}

// ------------------------------------------------------------------- solve

struct SolveArgs {
  std::string game;
  SolveOptions options;
  std::size_t elide_above = 10'000;
  std::string out;
};

void add_solve(CLI::App& app, SolveArgs& args) {
  auto* cmd = app.add_subcommand("solve", "Value iteration for v*, Q* and mu*");
  cmd->add_option("--game", args.game, "Game JSON file")->required();
  cmd->add_option("--tol", args.options.tol, "Sup-norm distance to Q*")->capture_default_str();
  cmd->add_option("--tau", args.options.tau, "Temperature for mu*")->capture_default_str();
  cmd->add_option("--max-iters", args.options.max_iters, "Sweep limit")->capture_default_str();
  cmd->add_option("--elide-above", args.elide_above,
                  "Omit Q_star and mu_star when they have more entries")
      ->capture_default_str();
  cmd->add_option("--out", args.out, "Output path (stdout if absent)");
}

int run_solve(const SolveArgs& args) {
  if (!(args.options.tol > 0.0)) throw ConfigError("--tol must be positive");
  if (!(args.options.tau > 0.0)) throw ConfigError("--tau must be positive");
  const auto game = load_game(args.game);
  const auto sol = solve(game, args.options);
  json doc = {{"tol", args.options.tol},
              {"tau", args.options.tau},
              {"max_iters", args.options.max_iters},
              {"discount", game.discount()},
              {"v_star", sol.v_star},
              {"residual", sol.residual},
              {"iterations", sol.iterations}};
  if (game.n_states() * game.n_profiles() <= args.elide_above) {
    doc["Q_star"] = rows_to_json(sol.q_star);
    doc["mu_star"] = rows_to_json(sol.mu_star);
  } else {
    doc["Q_star"] = nullptr;
    doc["elided"] = true;
  }
  emit(doc.dump(2) + "\n", args.out);
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string game;
  GameGenConfig gen;
  std::string scheme = "freq";
  std::string model = "known";
  double tau = 1e-3;
  std::optional<double> gamma;
  std::size_t rounds = 40;
  std::uint64_t base_length = 100;
  std::uint64_t explore_steps = 1'000'000;
  double reward_noise = 0.0;
  std::string out;
};

void add_simulate(CLI::App& app, SimulateArgs& args) {
  auto* cmd = app.add_subcommand("simulate", "One run of the logit-Q dynamics");
  cmd->add_option("--game", args.game, "Game JSON file (random game if absent)");
  cmd->add_option("--states", args.gen.n_states, "Random game: states")->capture_default_str();
  cmd->add_option("--agents", args.gen.n_agents, "Random game: agents")->capture_default_str();
  cmd->add_option("--actions", args.gen.actions, "Random game: actions per agent")->capture_default_str();
  cmd->add_option("--game-seed", args.gen.seed, "Random game: generator seed")->capture_default_str();
  cmd->add_option("--scheme", args.scheme, "Value update")
      ->check(CLI::IsMember({"ave", "freq"}))->capture_default_str();
  cmd->add_option("--model", args.model, "Model knowledge")
      ->check(CLI::IsMember({"known", "learned"}))->capture_default_str();
  cmd->add_option("--tau", args.tau, "Logit temperature")->capture_default_str();
  cmd->add_option("--gamma", args.gamma, "Discount factor (overrides the game's)");
  cmd->add_option("--rounds", args.rounds, "Number of rounds")->capture_default_str();
  cmd->add_option("--base-length", args.base_length, "Round n lasts base * n^2 stages")
      ->capture_default_str();
  cmd->add_option("--explore-steps", args.explore_steps,
                  "Learned model: length of the initial exploration round")
      ->capture_default_str();
  cmd->add_option("--reward-noise", args.reward_noise,
                  "Learned model: half-width of uniform payoff noise")
      ->capture_default_str();
  cmd->add_option("--out", args.out, "CSV output path (stdout if absent)");
}

ExperimentConfig simulate_config(const SimulateArgs& args, const Globals& g) {
  ExperimentConfig cfg;
  if (!args.game.empty()) cfg.game.file = args.game;
  cfg.game.generate = args.gen;
  if (args.gamma) {
    cfg.game.generate.discount = *args.gamma;
    cfg.game.discount = *args.gamma;
  }
  cfg.scheme = parse_scheme(args.scheme);
  cfg.model = parse_model_mode(args.model);
  cfg.tau = args.tau;
  cfg.rounds = args.rounds;
  cfg.base_length = args.base_length;
  cfg.explore_steps = args.explore_steps;
  cfg.reward_noise = args.reward_noise;
  cfg.n_runs = 1;
  cfg.seed = g.seed;
  cfg.threads = 1;
  cfg.check();
  return cfg;
}

int run_simulate(const SimulateArgs& args, const Globals& g) {
  const auto bundle = run_experiment(simulate_config(args, g));
  std::ostringstream csv;
  write_csv(bundle, csv);
  emit(csv.str(), args.out);
  if (g.verbose) {
    const auto sum = summarize(bundle);
    std::cerr << "final sup |v - v*| = " << sum.final_sup_delta_v.front()
              << ", stages = " << sum.total_stages
              << ", seconds = " << sum.runtime_seconds << '\n';
  }
  return 0;
}

// -------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string config;
  std::string out;
};

void add_experiment(CLI::App& app, ExperimentArgs& args) {
  auto* cmd = app.add_subcommand("experiment", "Multi-run experiment from a JSON config");
  cmd->add_option("--config", args.config, "Experiment config JSON")->required();
  cmd->add_option("--out", args.out, "CSV output path (overrides the config)");
}

int run_experiment_cmd(const ExperimentArgs& args, const Globals& g) {
  auto cfg = load_experiment_config(args.config);
  if (!args.out.empty()) cfg.output = args.out;
  if (g.threads != 0) cfg.threads = g.threads;
  if (cfg.output.empty()) throw ConfigError("--out (or config 'output') is required");
  const auto bundle = run_experiment(cfg);
  write_outputs(bundle);
  const auto sum = summarize(bundle);
  if (g.verbose) {
    std::cerr << "runs in band: " << sum.runs_in_band << "/" << bundle.runs.size()
              << ", within slack: " << sum.runs_within_slack
              << ", stages: " << sum.total_stages
              << ", seconds: " << sum.runtime_seconds << '\n';
  }
  return 0;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string game;
  std::string out;
};

void add_analyze(CLI::App& app, AnalyzeArgs& args) {
  auto* cmd = app.add_subcommand("analyze", "Recurrent classes of the state graph");
  cmd->add_option("--game", args.game, "Game JSON file")->required();
  cmd->add_option("--out", args.out, "Output path (stdout if absent)");
}

int run_analyze(const AnalyzeArgs& args) {
  const auto game = load_game(args.game);
  const auto graph = build_state_graph(game);
  const auto classes = recurrent_classes(graph);
  json doc = {{"recurrent_classes", classes},
              {"transient_states", transient_states(graph, classes)}};
  emit(doc.dump(2) + "\n", args.out);
  return 0;
}

// ------------------------------------------------------- verify-stationary

struct VerifyArgs {
  std::size_t count = 20;
  std::size_t max_agents = 3;
  std::size_t max_actions = 3;
  double tau_min = 0.05;
  double tau_max = 5.0;
  std::string out;
};

void add_verify(CLI::App& app, VerifyArgs& args) {
  auto* cmd = app.add_subcommand(
      "verify-stationary",
      "Compare closed-form and linear-solve stationary laws on random stage games");
  cmd->add_option("--count", args.count, "Number of random stage games")->capture_default_str();
  cmd->add_option("--max-agents", args.max_agents, "Agents drawn from 1..max")->capture_default_str();
  cmd->add_option("--max-actions", args.max_actions, "Actions drawn from 1..max")->capture_default_str();
  cmd->add_option("--tau-min", args.tau_min, "Temperature drawn log-uniformly from [min, max]")
      ->capture_default_str();
  cmd->add_option("--tau-max", args.tau_max)->capture_default_str();
  cmd->add_option("--out", args.out, "Output path (stdout if absent)");
}

int run_verify(const VerifyArgs& args, const Globals& g) {
  if (args.max_agents == 0 || args.max_actions == 0) {
    throw ConfigError("--max-agents and --max-actions must be positive");
  }
  if (!(args.tau_min > 0.0 && args.tau_min <= args.tau_max)) {
    throw ConfigError("--tau-min must be positive and at most --tau-max");
  }
  Rng rng(g.seed);
  json instances = json::array();
  double worst = 0.0;
  for (std::size_t k = 0; k < args.count; ++k) {
    const std::size_t agents = 1 + rng.below(args.max_agents);
    std::vector<std::size_t> counts(agents);
    for (auto& c : counts) c = 1 + rng.below(args.max_actions);
    const double tau = std::exp(rng.uniform(std::log(args.tau_min), std::log(args.tau_max)));
    JointActionCodec codec(counts);
    std::vector<double> q(codec.n_profiles());
    for (auto& x : q) x = rng.uniform();
    const auto closed = stationary_closed_form(q, tau);
    const auto brute = stationary_brute_force(transition_matrix(q, codec, tau));
    double gap = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) gap = std::max(gap, std::abs(closed[i] - brute[i]));
    worst = std::max(worst, gap);
    instances.push_back({{"action_counts", counts}, {"tau", tau}, {"linf_gap", gap}});
  }
  json doc = {{"seed", g.seed},
              {"count", args.count},
              {"max_agents", args.max_agents},
              {"max_actions", args.max_actions},
              {"tau_min", args.tau_min},
              {"tau_max", args.tau_max},
              {"max_linf_gap", worst},
              {"instances", instances}};
  emit(doc.dump(2) + "\n", args.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Logit-Q learning dynamics for identical-interest Markov games"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals globals;
  app.add_option("--seed", globals.seed, "Master seed for every stochastic output")
      ->capture_default_str();
  app.add_option("--threads", globals.threads, "Worker threads (0: all cores)");
  app.add_flag("--verbose,-v", globals.verbose, "Progress on stderr");

  GenerateArgs gen_args;
  SolveArgs solve_args;
  SimulateArgs sim_args;
  ExperimentArgs exp_args;
  AnalyzeArgs analyze_args;
  VerifyArgs verify_args;
  add_generate(app, gen_args);
  add_solve(app, solve_args);
  add_simulate(app, sim_args);
  add_experiment(app, exp_args);
  add_analyze(app, analyze_args);
  add_verify(app, verify_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    auto* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "generate") return run_generate(gen_args, globals);
    if (name == "solve") return run_solve(solve_args);
    if (name == "simulate") return run_simulate(sim_args, globals);
    if (name == "experiment") return run_experiment_cmd(exp_args, globals);
    if (name == "analyze") return run_analyze(analyze_args);
    if (name == "verify-stationary") return run_verify(verify_args, globals);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
