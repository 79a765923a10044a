#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "logitq/diagnostics.hpp"
#include "logitq/game.hpp"
#include "logitq/rounds.hpp"
#include "logitq/solver.hpp"

namespace logitq {

enum class ModelMode { kKnown, kLearned };

std::string to_string(ModelMode mode);
ModelMode parse_model_mode(const std::string& name);  // "known" | "learned"

// Either a game file or a generator configuration.
struct GameSource {
  std::optional<std::filesystem::path> file;
  GameGenConfig generate;
  std::optional<double> discount;  // overrides the game's discount when set
};

MarkovGame load_game_source(const GameSource& source);

struct ExperimentConfig {
  GameSource game;
  UpdateScheme scheme = UpdateScheme::kMostFrequent;
  ModelMode model = ModelMode::kKnown;
  double tau = 1e-3;
  std::size_t rounds = 40;
  std::uint64_t base_length = 100;
  std::uint64_t explore_steps = 1'000'000;  // learned model only
  std::size_t n_runs = 20;
  std::uint64_t seed = 0;
  std::filesystem::path output;  // CSV path; the summary goes next to it as .json
  std::size_t threads = 0;       // 0: hardware concurrency
  double reward_noise = 0.0;     // learned model only
  double band_slack = 0.05;      // tolerance for band membership in summaries
  double solver_tol = 1e-10;

  RoundSchedule schedule() const;
  void check() const;
};

// Keys mirror the field names; "game" is {"file": path} or
// {"generate": {...GameGenConfig fields...}}, optionally with "discount".
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct RunResult {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  RunRecord record;
  std::vector<DiagnosticsRecord> diagnostics;  // one per round
  std::vector<Band> envelope;                  // deviation_envelope per round
  std::size_t envelope_violations = 0;         // known model only
  std::vector<StateIndex> recurrent_class;     // class holding the final state
  double final_sup_delta_v = 0.0;              // over recurrent_class
  bool final_in_band = false;
};

struct AggregateCell {
  std::size_t round = 0;
  StateIndex state = 0;
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct ExperimentBundle {
  ExperimentConfig config;
  MarkovGame game;
  ExactSolution exact;
  Band value_band;
  std::vector<RunResult> runs;  // ordered by run index
  std::vector<AggregateCell> aggregate;  // per (round, state) across runs
  double wall_seconds = 0.0;
};

// Solves the game once, then executes n_runs seeded runs on worker threads.
// Run k uses the stream derive_seed(config.seed, k). Does not write files.
ExperimentBundle run_experiment(const ExperimentConfig& cfg);

struct ExperimentSummary {
  std::vector<double> final_sup_delta_v;  // per run
  std::size_t runs_in_band = 0;
  double fraction_in_band = 0.0;
  std::size_t runs_within_slack = 0;      // final_sup_delta_v <= band_slack
  std::size_t envelope_violations = 0;
  std::uint64_t total_stages = 0;
  double runtime_seconds = 0.0;
};

// Throws ConfigError("no rounds") if any run recorded no rounds.
ExperimentSummary summarize(const ExperimentBundle& bundle);
nlohmann::json to_json(const ExperimentBundle& bundle,
                       const ExperimentSummary& summary);

// Long-format CSV with '#' header lines echoing the configuration and the
// run-seed rule.
void write_csv(const ExperimentBundle& bundle, std::ostream& out);
// Writes config.output (CSV) and the summary JSON beside it.
void write_outputs(const ExperimentBundle& bundle);
std::filesystem::path summary_path(const std::filesystem::path& csv_path);

// Shortest round-trip decimal form; "nan" for NaN.
std::string format_real(double x);

}  // namespace logitq
