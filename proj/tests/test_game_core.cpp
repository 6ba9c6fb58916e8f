#include <doctest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>
#include <thread>
#include <vector>

#include "shapkit/caching.hpp"
#include "shapkit/coalition.hpp"
#include "shapkit/error.hpp"
#include "shapkit/fixture.hpp"
#include "shapkit/payoff.hpp"

using namespace shapkit;

TEST_CASE("canonical key ignores order and duplicates") {
  CHECK(Coalition({3, 1, 2}).key() == "1,2,3");
  CHECK(Coalition({2, 1, 2}).key() == "1,2");
  CHECK(Coalition{}.key().empty());
  CHECK(Coalition({10, 9}).key() == "9,10");
  CHECK(Coalition({1, 2}) == Coalition({2, 1}));
}

TEST_CASE("canonical key is injective over subsets of 0..9") {
  std::set<std::string> keys;
  for (unsigned mask = 0; mask < 1024; ++mask) {
    std::vector<FeatureId> members;
    for (FeatureId i = 0; i < 10; ++i) {
      if (mask >> i & 1) members.push_back(i);
    }
    keys.insert(Coalition(members).key());
  }
  CHECK(keys.size() == 1024);
}

TEST_CASE("parse_key round trips and rejects garbage") {
  CHECK(Coalition::parse_key("3,1").key() == "1,3");
  CHECK(Coalition::parse_key("").empty());
  CHECK_THROWS_AS(Coalition::parse_key("1,,2"), InvalidArgument);
  CHECK_THROWS_AS(Coalition::parse_key("a"), InvalidArgument);
  CHECK_THROWS_AS(Coalition::parse_key("-1"), InvalidArgument);
}

TEST_CASE("feature set validation") {
  CHECK_THROWS_AS(FeatureSet(std::vector<Feature>{}), InvalidArgument);
  CHECK_THROWS_AS(FeatureSet({{1, "a", "a"}, {1, "b", "b"}}), InvalidArgument);
  std::vector<std::string> many(65, "x");
  CHECK_THROWS(FeatureSet::from_labels(many));
  const auto fs = FeatureSet::from_labels({"a", "b", "c"});
  CHECK(fs.size() == 3);
  CHECK(fs.index_of(2) == 2u);
  CHECK_FALSE(fs.contains(7));
}

TEST_CASE("masks map to coalitions and back") {
  const FeatureSet fs({{5, "a", "a"}, {2, "b", "b"}, {9, "c", "c"}});
  const auto c = Coalition::from_mask(fs, 0b101);
  CHECK(c.key() == "5,9");
  CHECK(c.to_mask(fs) == 0b101u);
  CHECK(Coalition::all(fs).key() == "2,5,9");
  CHECK_THROWS_AS(Coalition({4}).to_mask(fs), InvalidArgument);
}

TEST_CASE("table game lookups use canonical keys and a default") {
  TableGame game({}, 0.25);
  game.set(Coalition({2, 0}), 1.5);
  CHECK(game.evaluate(Coalition({0, 2})) == 1.5);
  CHECK(game.evaluate(Coalition({1})) == 0.25);
  CHECK(game.is_deterministic());
  CHECK_THROWS_AS(game.set(Coalition{}, std::nan("")), InvalidArgument);
}

TEST_CASE("noisy game: zero noise is exact, draws are reproducible, mean is unbiased") {
  auto base = std::make_shared<TableGame>(std::map<std::string, double>{{"0", 2.0}}, 0.0);
  NoisyGame silent(base, 0.0, 1);
  CHECK(silent.evaluate(Coalition({0})) == 2.0);

  NoisyGame a(base, 0.1, 7);
  NoisyGame b(base, 0.1, 7);
  for (int i = 0; i < 5; ++i) CHECK(a.evaluate(Coalition{}) == b.evaluate(Coalition{}));
  CHECK(a.draws() == 5);
  CHECK_FALSE(a.is_deterministic());

  NoisyGame noisy(base, 1.0, 3);
  const double mean = sample_mean_payoff(noisy, Coalition{}, 10000);
  CHECK(std::abs(mean) < 0.05);
  CHECK_THROWS_AS(sample_mean_payoff(noisy, Coalition{}, 0), InvalidArgument);
}

TEST_CASE("caching wrapper memoizes by canonical key") {
  std::atomic<int> calls{0};
  FunctionGame counting(
      [&](const Coalition& c) {
        ++calls;
        return static_cast<double>(c.size());
      },
      true, "size");
  CachingWrapper cache(counting);
  const auto fs = FeatureSet::from_labels({"a", "b", "c", "d"});
  for (int pass = 0; pass < 2; ++pass) {
    for (CoalitionMask m = 0; m < 16; ++m) cache.evaluate(Coalition::from_mask(fs, m));
  }
  CHECK(calls == 16);
  CHECK(cache.calls_to_inner() == 16);
  CHECK(cache.cache_hits() == 16);
  CHECK(cache.size() == 16);
  CHECK(cache.lookup(Coalition({1, 0})) == 2.0);
  CHECK_FALSE(cache.lookup(Coalition({7})).has_value());
}

TEST_CASE("caching wrapper freezes the first stochastic draw") {
  auto base = std::make_shared<TableGame>();
  NoisyGame noisy(base, 1.0, 11);
  CachingWrapper cache(noisy);
  const double first = cache.evaluate(Coalition({1, 2}));
  CHECK(cache.evaluate(Coalition({2, 1})) == first);
  CHECK(cache.is_deterministic());
}

TEST_CASE("concurrent misses on one key make one inner call") {
  std::atomic<int> calls{0};
  FunctionGame slow(
      [&](const Coalition&) {
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        return 1.0;
      },
      true, "slow");
  CachingWrapper cache(slow);
  std::vector<std::thread> threads;
  std::atomic<int> ones{0};
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      if (cache.evaluate(Coalition({0, 1})) == 1.0) ++ones;
    });
  }
  for (auto& t : threads) t.join();
  CHECK(calls == 1);
  CHECK(ones == 8);
}

TEST_CASE("failed inner calls are not cached") {
  int calls = 0;
  FunctionGame flaky(
      [&](const Coalition&) -> double {
        if (++calls == 1) throw std::runtime_error("transient");
        return 3.0;
      },
      true, "flaky");
  CachingWrapper cache(flaky);
  CHECK_THROWS_AS(cache.evaluate(Coalition({0})), std::runtime_error);
  CHECK_FALSE(cache.lookup(Coalition({0})).has_value());
  CHECK(cache.evaluate(Coalition({0})) == 3.0);
  CHECK(calls == 2);
}

TEST_CASE("game fixtures load and validate") {
  const auto fixture = load_game_fixture(SHAPKIT_FIXTURE_DIR "/games/partner_overlap.json");
  CHECK(fixture.name == "partner_overlap");
  CHECK(fixture.features.size() == 4);
  CHECK(fixture.game->evaluate(Coalition({1, 0})) == 1.0);
  CHECK(fixture.game->evaluate(Coalition({0, 2})) == 0.0);

  CHECK_THROWS_AS(game_fixture_from_json(nlohmann::json::parse(R"({"entries":{"1,0":1,"0,1":2}})"), "x"),
                  FixtureError);
  CHECK_THROWS_AS(game_fixture_from_json(
                      nlohmann::json::parse(R"({"features":[{"id":0}],"entries":{"3":1}})"), "x"),
                  FixtureError);
  CHECK_THROWS_AS(load_game_fixture("/nonexistent.json"), FixtureError);
  const auto round = table_game_from_json(to_json(*fixture.game));
  CHECK(round.entries() == fixture.game->entries());
}
