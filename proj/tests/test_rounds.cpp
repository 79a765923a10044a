#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "logitq/errors.hpp"
#include "logitq/graph.hpp"
#include "logitq/rounds.hpp"
#include "logitq/solver.hpp"
#include "test_games.hpp"

using namespace logitq;

namespace {

RoundEstimates with_counts(std::vector<double> q_row, std::vector<std::uint64_t> counts) {
  RoundEstimates est(1, q_row.size());
  for (std::size_t a = 0; a < q_row.size(); ++a) {
    est.q(0, a) = q_row[a];
    for (std::uint64_t k = 0; k < counts[a]; ++k) est.record(0, a);
  }
  return est;
}

}  // namespace

TEST_CASE("round schedule") {
  RoundSchedule s;
  s.base_length = 100;
  s.total_rounds = 3;
  CHECK(s.length(1) == 100);
  CHECK(s.length(3) == 900);
  CHECK(s.total_stages() == 1400);
  CHECK_THROWS_AS(s.length(0), IndexError);
  CHECK_THROWS_AS(s.length(4), IndexError);

  s.initial_round = 5000;
  CHECK(s.round_count() == 4);
  CHECK(s.length(1) == 5000);
  CHECK(s.length(2) == 100);
  CHECK(s.length(4) == 900);

  s.base_length = 0;
  CHECK_THROWS_AS(s.check(), ConfigError);
  CHECK(parse_scheme("ave") == UpdateScheme::kAverage);
  CHECK(parse_scheme("freq") == UpdateScheme::kMostFrequent);
  CHECK_THROWS_AS(parse_scheme("mode"), ConfigError);
}

TEST_CASE("value estimates from counts") {
  const std::vector<double> prev{-9.0};
  CHECK(v_average(with_counts({2, 1}, {7, 3}), prev)[0] == doctest::Approx(1.7));
  CHECK(v_average(with_counts({2, 1}, {0, 4}), prev)[0] == 1.0);
  CHECK(v_most_frequent(with_counts({2, 1}, {7, 3}), prev)[0] == 2.0);
  CHECK(v_most_frequent(with_counts({2, 1}, {5, 5}), prev)[0] == 1.5);
  // Unvisited states keep the previous value.
  CHECK(v_average(with_counts({2, 1}, {0, 0}), prev)[0] == -9.0);
  CHECK(v_most_frequent(with_counts({2, 1}, {0, 0}), prev)[0] == -9.0);

  const auto freq = sampled_frequency(with_counts({2, 1}, {7, 3}));
  REQUIRE(freq.size() == 1);
  CHECK(freq[0].frequency[0] == doctest::Approx(0.7));
  CHECK(sampled_frequency(with_counts({2, 1}, {0, 1}))[0].frequency ==
        std::vector<double>{0.0, 1.0});
  CHECK(sampled_frequency(with_counts({2, 1}, {0, 0})).empty());
}

TEST_CASE("q_update") {
  const auto game = testing::one_state_game(0.5);
  const std::vector<double> v{2.0};
  const auto q = q_update(game, v);
  CHECK(q(0, 0) == 2.0);
  CHECK(q(0, 1) == 1.0);

  const auto myopic = generate_random_game({3, 2, {}, 2, 0.0, 0.2, 1.0, 1});
  CHECK(q_update(myopic, std::vector<double>{4, 5, 6}) == myopic.reward());

  const auto g = generate_random_game({4, 2, {}, 2, 0.6, 0.2, 1.0, 2});
  const auto sol = solve(g, {1e-12, 100000, 1e-3});
  CHECK(sup_norm_diff(q_update(g, sol.v_star), sol.q_star) <= 1e-11);
  CHECK_THROWS_AS(q_update(g, std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("run_round") {
  const auto game = testing::one_state_game(0.5);
  DynamicsConfig cfg;
  SUBCASE("one stage, one count") {
    RoundEstimates est(1, 2);
    StagePlayState play(1);
    Rng rng(1);
    run_round(game, est, play, 1, 0, cfg, rng);
    CHECK(est.state_visits[0] == 1);
    CHECK(est.count(0, 0) + est.count(0, 1) == 1);
  }
  SUBCASE("single state collects every stage") {
    RoundEstimates est(1, 2);
    StagePlayState play(1);
    Rng rng(1);
    run_round(game, est, play, 10'000, 0, cfg, rng);
    CHECK(est.state_visits[0] == 10'000);
  }
  SUBCASE("same seed, same counters") {
    const auto g = generate_random_game({3, 2, {}, 2, 0.6, 0.2, 1.0, 6});
    RoundEstimates a(3, 4), b(3, 4);
    a.q = b.q = g.reward();
    StagePlayState pa(3), pb(3);
    Rng ra(77), rb(77);
    const auto end_a = run_round(g, a, pa, 5000, 0, cfg, ra);
    const auto end_b = run_round(g, b, pb, 5000, 0, cfg, rb);
    CHECK(end_a == end_b);
    CHECK(a.profile_visits == b.profile_visits);
  }
}

TEST_CASE("v_average tracks the expected payoff under the stationary law") {
  const auto game = testing::stage_game({2, 2}, {0.9, 0.2, 0.4, 0.7}, 0.5);
  RoundEstimates est(1, 4);
  est.q = game.reward();
  StagePlayState play(1);
  DynamicsConfig cfg;
  cfg.tau = 0.3;
  Rng rng(21);
  run_round(game, est, play, 1'000'000, 0, cfg, rng);
  const auto mu = logit_distribution(est.q.row(0), cfg.tau);
  double expected = 0.0;
  for (std::size_t a = 0; a < 4; ++a) expected += mu[a] * est.q(0, a);
  CHECK(std::abs(v_average(est, std::vector<double>{0.0})[0] - expected) <= 0.01);
  CHECK(v_most_frequent(est, std::vector<double>{0.0})[0] == 0.9);
}

TEST_CASE("run_dynamics on the one-state game") {
  const auto game = testing::one_state_game(0.5);
  RoundSchedule schedule;
  schedule.total_rounds = 10;
  RunOptions options;
  options.dynamics.tau = 1e-3;

  SUBCASE("most frequent converges to v* = 2") {
    options.scheme = UpdateScheme::kMostFrequent;
    Rng rng(3);
    const auto rec = run_dynamics(game, schedule, options, rng);
    REQUIRE(rec.rounds.size() == 10);
    CHECK(std::abs(rec.rounds.back().v[0] - 2.0) <= 0.01);
    CHECK(rec.total_stages == schedule.total_stages());
  }
  SUBCASE("average stays in the band") {
    options.scheme = UpdateScheme::kAverage;
    Rng rng(3);
    const auto rec = run_dynamics(game, schedule, options, rng);
    const double lower = 2.0 - 1e-3 * std::log(2.0) / 0.5 - 0.01;
    CHECK(rec.rounds.back().v[0] >= lower);
    CHECK(rec.rounds.back().v[0] <= 2.01);
  }
  SUBCASE("myopic game tracks the best reward") {
    Rng rng(4);
    const auto g0 = testing::one_state_game(0.0);
    const auto rec = run_dynamics(g0, schedule, options, rng);
    CHECK(std::abs(rec.rounds.back().v[0] - 1.0) <= 0.01);
  }
}

TEST_CASE("run_dynamics bookkeeping") {
  const auto game = generate_random_game({3, 2, {}, 2, 0.6, 0.2, 1.0, 12});
  RoundSchedule schedule;
  schedule.base_length = 50;
  schedule.total_rounds = 6;
  RunOptions options;
  options.dynamics.tau = 0.05;

  std::vector<QTable> q_at_start;
  std::vector<std::uint64_t> starts;
  RunHooks hooks;
  hooks.on_round_start = [&](const RoundSnapshot& s) {
    q_at_start.push_back(s.q);
    starts.push_back(s.round);
  };
  std::size_t ends = 0;
  hooks.on_round_end = [&](const RoundSnapshot& s) {
    // Q is held fixed for the whole round.
    CHECK(s.q == q_at_start.back());
    std::uint64_t visits = 0;
    for (auto c : s.estimates.state_visits) visits += c;
    CHECK(visits == s.round_length);
    ++ends;
  };
  Rng rng(9);
  const auto rec = run_dynamics(game, schedule, options, rng, hooks);
  CHECK(ends == 6);
  CHECK(starts == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6});
  CHECK(q_at_start.front() == game.reward());
  for (std::size_t n = 0; n < rec.rounds.size(); ++n) CHECK(rec.rounds[n].round == n + 1);
  CHECK(rec.rounds.back().total_stages == schedule.total_stages());

  Rng again(9);
  const auto rec2 = run_dynamics(game, schedule, options, again);
  CHECK(rec2.rounds.back().v == rec.rounds.back().v);
  CHECK(rec2.final_state == rec.final_state);
}

TEST_CASE("trajectories never leave a recurrent class once inside") {
  const auto game = testing::transient_game();
  const auto classes = recurrent_classes(build_state_graph(game));
  REQUIRE(classes.size() == 1);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RoundEstimates est(4, 2);
    est.q = game.reward();
    StagePlayState play(4);
    DynamicsConfig cfg;
    cfg.tau = 0.2;
    Rng rng(seed);
    bool inside = false;
    std::size_t exits = 0;
    run_round(game, est, play, 100'000, 0, cfg, rng, [&](StateIndex, ProfileIndex, StateIndex t) {
      const bool in = std::binary_search(classes[0].begin(), classes[0].end(), t);
      if (inside && !in) ++exits;
      inside = inside || in;
    });
    CHECK(inside);
    CHECK(exits == 0);
  }
}
