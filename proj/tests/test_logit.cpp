#include <doctest.h>

#include <cmath>

#include "logitq/errors.hpp"
#include "logitq/logit.hpp"
#include "logitq/solver.hpp"
#include "test_games.hpp"

using namespace logitq;

TEST_CASE("logit_response") {
  SUBCASE("constant slice gives the uniform law") {
    JointActionCodec codec({3, 2});
    const std::vector<double> q{5, 1, 5, 2, 5, 3};  // agent 0's slice at agent 1 = 0
    std::vector<double> out(3);
    logit_response(q, codec, 0, codec.encode(std::vector<std::size_t>{2, 0}), 0.1, out);
    for (double p : out) CHECK(p == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("single agent, row (1, 0), tau 1") {
    JointActionCodec codec({2});
    const std::vector<double> q{1.0, 0.0};
    std::vector<double> out(2);
    logit_response(q, codec, 0, 1, 1.0, out);
    CHECK(out[0] == doctest::Approx(0.73106).epsilon(1e-5));
    CHECK(out[1] == doctest::Approx(0.26894).epsilon(1e-5));
  }
  SUBCASE("play-state version requires a visited state") {
    const auto game = testing::stage_game({2, 2}, {1, 0, 0, 1}, 0.5);
    StagePlayState play(1);
    CHECK_THROWS_AS(logit_response(game.reward(), 0, 0, play, game.codec(), 1.0), StateError);
    CHECK_THROWS_AS(play.profile(0), StateError);
    play.set(0, 3);
    const auto pi = logit_response(game.reward(), 0, 0, play, game.codec(), 1.0);
    // Agent 1 plays 1: agent 0 compares Q(0,1) = 0 and Q(1,1) = 1.
    CHECK(pi[1] == doctest::Approx(std::exp(1.0) / (1.0 + std::exp(1.0))));
  }
}

TEST_CASE("revise_profile keeps the other agents' actions") {
  JointActionCodec codec({3, 4});
  Rng rng(5);
  std::vector<double> q(12);
  for (auto& x : q) x = rng.uniform();
  for (int k = 0; k < 1000; ++k) {
    const ProfileIndex a = rng.below(12);
    const ProfileIndex b = revise_profile(q, codec, a, 0, 0.3, rng);
    CHECK(codec.component(b, 1) == codec.component(a, 1));
  }
}

TEST_CASE("revision at tiny temperature picks the maximizer") {
  JointActionCodec codec({3, 2});
  // With agent 1 on action 1, agent 0 sees (0.5, 0.2, 0.4).
  std::vector<double> q{0.1, 0.5, 0.9, 0.2, 0.3, 0.4};
  Rng rng(8);
  std::size_t hits = 0;
  const ProfileIndex start = codec.encode(std::vector<std::size_t>{2, 1});
  for (int k = 0; k < 10'000; ++k) {
    hits += codec.component(revise_profile(q, codec, start, 0, 1e-6, rng), 0) == 0;
  }
  CHECK(hits >= 9990);
}

TEST_CASE("step_stage_game") {
  const auto game = testing::stage_game({2, 2}, {0.2, 0.1, 0.4, 0.3}, 0.5);
  const auto& codec = game.codec();
  DynamicsConfig cfg;
  cfg.tau = 0.2;
  SUBCASE("first visit uses the configured profile") {
    cfg.first_visit = FirstVisitRule::kFixedProfile;
    cfg.first_profile = 2;
    StagePlayState play(1);
    Rng rng(1);
    CHECK(step_stage_game(game.reward(), 0, play, codec, cfg, rng) == 2);
    CHECK(play.profile(0) == 2);
  }
  SUBCASE("each step changes at most one agent's action") {
    StagePlayState play(1);
    Rng rng(2);
    ProfileIndex prev = step_stage_game(game.reward(), 0, play, codec, cfg, rng);
    for (int k = 0; k < 5000; ++k) {
      const ProfileIndex next = step_stage_game(game.reward(), 0, play, codec, cfg, rng);
      int changed = 0;
      for (std::size_t i = 0; i < 2; ++i) changed += codec.component(prev, i) != codec.component(next, i);
      CHECK(changed <= 1);
      CHECK(play.profile(0) == next);
      prev = next;
    }
  }
}

TEST_CASE("transition_matrix") {
  SUBCASE("2 agents x 2 actions with constant Q") {
    JointActionCodec codec({2, 2});
    const std::vector<double> q(4, 1.0);
    const auto p = transition_matrix(q, codec, 0.5);
    for (int a = 0; a < 4; ++a) {
      CHECK(p(a, a) == doctest::Approx(0.5));
      for (int b = 0; b < 4; ++b) {
        const int diff = ((a >> 1) != (b >> 1)) + ((a & 1) != (b & 1));
        if (diff == 1) CHECK(p(a, b) == doctest::Approx(0.25));
        if (diff == 2) CHECK(p(a, b) == 0.0);
      }
    }
  }
  SUBCASE("one agent: rows equal the logit law") {
    JointActionCodec codec({3});
    const std::vector<double> q{0.2, 0.9, 0.4};
    const auto p = transition_matrix(q, codec, 0.3);
    const auto pi = logit_distribution(q, 0.3);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) CHECK(p(a, b) == doctest::Approx(pi[b]).epsilon(1e-14));
    }
  }
  SUBCASE("rows sum to one and the chain is primitive") {
    Rng rng(3);
    for (int k = 0; k < 10; ++k) {
      JointActionCodec codec({2, 3, 2});
      std::vector<double> q(12);
      for (auto& x : q) x = rng.uniform(-1.0, 1.0);
      const auto p = transition_matrix(q, codec, 0.5);
      for (int a = 0; a < 12; ++a) CHECK(p.row(a).sum() == doctest::Approx(1.0).epsilon(1e-14));
      // n + 1 = 4 steps reach every profile.
      Eigen::MatrixXd power = p * p * p * p;
      CHECK(power.minCoeff() > 0.0);
    }
  }
  SUBCASE("cap") {
    JointActionCodec codec({4, 4, 4});
    const std::vector<double> q(64, 0.0);
    CHECK_THROWS_AS(transition_matrix(q, codec, 1.0, 32), SizeError);
  }
}

TEST_CASE("stationary distribution") {
  SUBCASE("constant Q is uniform, by both routes") {
    JointActionCodec codec({2, 2});
    const std::vector<double> q(4, 0.7);
    for (double m : stationary_closed_form(q, 1.0)) CHECK(m == doctest::Approx(0.25));
    for (double m : stationary_brute_force(transition_matrix(q, codec, 1.0))) {
      CHECK(m == doctest::Approx(0.25).epsilon(1e-12));
    }
  }
  SUBCASE("rank-one chain returns its row") {
    const std::vector<double> pi{0.7310585786300049, 0.2689414213699951};
    Eigen::MatrixXd p(2, 2);
    p << pi[0], pi[1], pi[0], pi[1];
    const auto mu = stationary_brute_force(p);
    CHECK(mu[0] == doctest::Approx(pi[0]).epsilon(1e-14));
    const std::vector<double> row{1.0, 0.0};
    CHECK(stationary_closed_form(row, 1.0)[0] == doctest::Approx(pi[0]).epsilon(1e-14));
  }
  SUBCASE("closed form matches the linear solve") {
    Rng rng(10);
    for (int k = 0; k < 20; ++k) {
      JointActionCodec codec({2, 3, 3});
      std::vector<double> q(18);
      for (auto& x : q) x = rng.uniform(-1.0, 1.0);
      const double tau = rng.uniform(0.05, 3.0);
      const auto a = stationary_closed_form(q, tau);
      const auto b = stationary_brute_force(transition_matrix(q, codec, tau));
      for (std::size_t i = 0; i < 18; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-10);
    }
  }
  SUBCASE("rejects a non-stochastic matrix") {
    Eigen::MatrixXd p(2, 2);
    p << 0.5, 0.4, 0.5, 0.5;
    CHECK_THROWS_AS(stationary_brute_force(p), NumericError);
  }
  SUBCASE("long simulated chain matches the closed form") {
    const auto game = testing::stage_game({2, 2}, {0.9, 0.2, 0.4, 0.7}, 0.5);
    StagePlayState play(1);
    DynamicsConfig cfg;
    cfg.tau = 0.5;
    Rng rng(12);
    std::vector<double> freq(4, 0.0);
    const int n = 1'000'000;
    for (int k = 0; k < n; ++k) freq[step_stage_game(game.reward(), 0, play, game.codec(), cfg, rng)] += 1.0 / n;
    CHECK(total_variation(freq, stationary_closed_form(game.reward().row(0), 0.5)) <= 0.01);
  }
}
