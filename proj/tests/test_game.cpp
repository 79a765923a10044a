#include <doctest.h>

#include <cmath>
#include <numeric>

#include "logitq/errors.hpp"
#include "logitq/game.hpp"
#include "test_games.hpp"

using namespace logitq;

TEST_CASE("codec round-trips every profile up to 3 agents x 4 actions") {
  for (std::size_t agents = 1; agents <= 3; ++agents) {
    for (std::size_t actions = 1; actions <= 4; ++actions) {
      JointActionCodec codec(std::vector<std::size_t>(agents, actions));
      CHECK(codec.n_profiles() == static_cast<std::size_t>(std::pow(actions, agents)));
      for (ProfileIndex a = 0; a < codec.n_profiles(); ++a) {
        const auto parts = codec.decode(a);
        REQUIRE(codec.encode(parts) == a);
        for (std::size_t i = 0; i < agents; ++i) {
          CHECK(parts[i] < actions);
          CHECK(codec.component(a, i) == parts[i]);
        }
      }
    }
  }
}

TEST_CASE("codec puts agent 0 in the most significant digit") {
  JointActionCodec codec({2, 3});
  CHECK(codec.encode(std::vector<std::size_t>{1, 0}) == 3);
  CHECK(codec.encode(std::vector<std::size_t>{0, 2}) == 2);
  CHECK(codec.with_component(5, 0, 0) == 2);
  CHECK_THROWS_AS(codec.encode(std::vector<std::size_t>{2, 0}), IndexError);
  CHECK_THROWS_AS(codec.decode(6), IndexError);
}

TEST_CASE("validate") {
  SUBCASE("identity 1-state game is valid") {
    CHECK(validate(testing::one_state_game(0.5)).empty());
  }
  SUBCASE("row summing to 0.9 names (s, a)") {
    QTable r(2, 1, 0.0);
    MarkovGame g(2, {1}, 0.5, r, {0.5, 0.5, 0.4, 0.5});
    auto v = validate(g);
    REQUIRE(v.size() == 1);
    CHECK(v[0].message.find("(s=1, a=0)") != std::string::npos);
  }
  SUBCASE("discount 1 is rejected") {
    auto v = validate(testing::one_state_game(1.0));
    REQUIRE(v.size() == 1);
    CHECK(v[0].message.find("discount out of range") != std::string::npos);
  }
  SUBCASE("negative entry and non-finite reward") {
    QTable r(1, 1, std::nan(""));
    MarkovGame g(1, {1}, 0.5, r, {1.0});
    CHECK(validate(g).size() == 1);
    MarkovGame h(2, {1}, 0.5, QTable(2, 1), {1.5, -0.5, 0.0, 1.0});
    CHECK(validate(h).size() == 1);
  }
}

TEST_CASE("shape errors at construction") {
  CHECK_THROWS_AS(MarkovGame(1, {2}, 0.5, QTable(1, 3), {1.0, 1.0}), ShapeError);
  CHECK_THROWS_AS(MarkovGame(1, {2}, 0.5, QTable(1, 2), {1.0}), ShapeError);
  CHECK_THROWS_AS(MarkovGame(0, {2}, 0.5, QTable(0, 2), {}), ConfigError);
}

TEST_CASE("sample_next_state") {
  Rng rng(7);
  SUBCASE("deterministic row") {
    // p(s1 | s0, .) = 1
    auto g = testing::chain_game();
    for (int k = 0; k < 1000; ++k) CHECK(sample_next_state(g, 0, 0, rng) == 1);
  }
  SUBCASE("uniform row frequencies within 0.01 at 1e5 draws") {
    QTable r(2, 1);
    MarkovGame g(2, {1}, 0.5, r, {0.5, 0.5, 0.5, 0.5});
    std::size_t hits = 0;
    const std::size_t n = 100'000;
    for (std::size_t k = 0; k < n; ++k) hits += sample_next_state(g, 0, 0, rng);
    CHECK(std::abs(static_cast<double>(hits) / n - 0.5) <= 0.01);
  }
  SUBCASE("determinism") {
    auto g = generate_random_game({3, 2, {}, 2, 0.6, 0.2, 1.0, 5});
    Rng a(11), b(11);
    for (int k = 0; k < 100; ++k) {
      CHECK(sample_next_state(g, k % 3, k % 4, a) == sample_next_state(g, k % 3, k % 4, b));
    }
  }
  SUBCASE("index errors") {
    auto g = testing::one_state_game(0.5);
    CHECK_THROWS_AS(sample_next_state(g, 1, 0, rng), IndexError);
    CHECK_THROWS_AS(sample_next_state(g, 0, 2, rng), IndexError);
  }
}

TEST_CASE("empirical next-state law converges to the transition row") {
  auto g = generate_random_game({4, 2, {}, 2, 0.6, 0.2, 1.0, 3});
  Rng rng(99);
  const std::size_t n = 100'000;
  for (StateIndex s = 0; s < 2; ++s) {
    std::vector<double> freq(g.n_states(), 0.0);
    for (std::size_t k = 0; k < n; ++k) freq[sample_next_state(g, s, 1, rng)] += 1.0 / n;
    double tv = 0.0;
    auto p = g.transition_row(s, 1);
    for (StateIndex t = 0; t < g.n_states(); ++t) tv += 0.5 * std::abs(freq[t] - p[t]);
    CHECK(tv <= 0.01);
  }
}

TEST_CASE("generate_random_game") {
  SUBCASE("rows normalized and rewards scaled to max 1") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto g = generate_random_game({3, 2, {}, 3, 0.6, 0.2, 1.0, seed});
      CHECK(validate(g).empty());
      double largest = 0.0;
      for (double r : g.reward().values()) {
        CHECK(r >= 0.0);
        largest = std::max(largest, std::abs(r));
      }
      CHECK(largest == 1.0);
      // Unnormalized entries are at least 0.2 of at most n_states.
      for (double p : g.transition_values()) CHECK(p >= 0.2 / 3.0 - 1e-15);
    }
  }
  SUBCASE("5 states x 5 agents x 5 actions gives a 5 x 3125 reward tensor") {
    auto g = generate_random_game({5, 5, {}, 5, 0.6, 0.2, 1.0, 1});
    CHECK(g.reward().n_states() == 5);
    CHECK(g.reward().n_profiles() == 3125);
    CHECK(validate(g).empty());
  }
  SUBCASE("later states carry larger rewards on average") {
    auto g = generate_random_game({4, 2, {}, 4, 0.6, 0.2, 1.0, 2});
    auto mean = [&](StateIndex s) {
      auto row = g.reward().row(s);
      return std::accumulate(row.begin(), row.end(), 0.0) / row.size();
    };
    CHECK(mean(0) < mean(3));
  }
  SUBCASE("degenerate configs") {
    CHECK_THROWS_AS(generate_random_game({0, 2, {}, 2, 0.6, 0.2, 1.0, 0}), ConfigError);
    CHECK_THROWS_AS(generate_random_game({2, 0, {}, 2, 0.6, 0.2, 1.0, 0}), ConfigError);
    CHECK_THROWS_AS(generate_random_game({2, 2, {}, 2, 0.6, 0.0, 1.0, 0}), ConfigError);
  }
  SUBCASE("same seed, same game") {
    auto a = generate_random_game({3, 2, {}, 2, 0.6, 0.2, 1.0, 42});
    auto b = generate_random_game({3, 2, {}, 2, 0.6, 0.2, 1.0, 42});
    CHECK(a.reward() == b.reward());
  }
}

TEST_CASE("game JSON round trip and rejection") {
  auto g = generate_random_game({2, 2, {}, 2, 0.6, 0.2, 1.0, 8});
  auto back = game_from_json(game_to_json(g));
  CHECK(back.reward() == g.reward());
  CHECK(back.discount() == g.discount());
  for (std::size_t i = 0; i < g.transition_values().size(); ++i) {
    CHECK(back.transition_values()[i] == g.transition_values()[i]);
  }

  auto doc = game_to_json(g);
  doc["transition"][0][0][0] = 0.0;
  CHECK_THROWS_AS(game_from_json(doc), ConfigError);

  auto missing = game_to_json(g);
  missing.erase("reward");
  CHECK_THROWS_WITH_AS(game_from_json(missing), doctest::Contains("reward"), ConfigError);

  auto bad_shape = game_to_json(g);
  bad_shape["reward"][1] = std::vector<double>{1.0};
  CHECK_THROWS_AS(game_from_json(bad_shape), ConfigError);
}
