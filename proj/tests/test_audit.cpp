#include <doctest.h>

#include <cmath>

#include "shapkit/audit.hpp"
#include "support/oracles.hpp"

using namespace shapkit;

namespace {

std::vector<GameFixture> all_fixtures() {
  std::vector<GameFixture> out;
  for (const char* name : {"partner_overlap", "pair_synergy", "dummy_and_twins"}) {
    out.push_back(load_game_fixture(std::string(SHAPKIT_FIXTURE_DIR "/games/") + name + ".json"));
  }
  return out;
}

}  // namespace

TEST_CASE("efficiency residual against the game span") {
  const auto f = load_game_fixture(SHAPKIT_FIXTURE_DIR "/games/partner_overlap.json");
  const auto cached = attribute_cached(*f.game, f.features);
  const auto eff = check_efficiency(cached, *f.game, f.features);
  CHECK(eff.pass);
  CHECK(eff.residual <= 1e-12);

  const auto window = attribute_sliding_window(*f.game, f.features, 2, false,
                                               WindowContext::kRestricted);
  const auto bad = check_efficiency(window, *f.game, f.features);
  CHECK_FALSE(bad.pass);
  CHECK(bad.residual == doctest::Approx(0.75));

  NoisyGame noisy(f.game, 0.1, 1);
  CHECK_THROWS_AS(check_efficiency(cached, noisy, f.features), NonDeterministicSource);
}

TEST_CASE("symmetry and null player antecedents") {
  const auto f = load_game_fixture(SHAPKIT_FIXTURE_DIR "/games/dummy_and_twins.json");
  const auto cached = attribute_cached(*f.game, f.features);

  const auto sym = check_symmetry(f.features, *f.game, cached);
  std::size_t judged = 0;
  for (const auto& s : sym) {
    if (!s.antecedent_holds) continue;
    ++judged;
    CHECK(s.pass);
    // Only b and c (ids 1, 2) are interchangeable.
    CHECK(s.pair == std::pair<FeatureId, FeatureId>{1, 2});
  }
  CHECK(judged == 1);

  const auto nulls = check_null_player(f.features, *f.game, cached);
  for (const auto& n : nulls) {
    CHECK(n.is_null == (n.id == 3));
    if (n.is_null) CHECK(n.pass);
  }
}

TEST_CASE("per-method audit reports") {
  const auto f = load_game_fixture(SHAPKIT_FIXTURE_DIR "/games/partner_overlap.json");
  const auto exact = audit(Method::kExact, f.features, *f.game);
  CHECK(exact.efficiency.pass);
  CHECK(exact.symmetry_pass());
  CHECK(exact.null_player_pass());

  const auto window = audit(Method::kSlidingWindow, f.features, *f.game);
  CHECK_FALSE(window.efficiency.pass);
  CHECK(window.efficiency.residual == doctest::Approx(1.25));
  CHECK_FALSE(window.symmetry_pass());

  AuditOptions restricted;
  restricted.window_context = WindowContext::kRestricted;
  const auto window_r = audit(Method::kSlidingWindow, f.features, *f.game, restricted);
  CHECK(window_r.efficiency.residual == doctest::Approx(0.75));
  CHECK_FALSE(window_r.symmetry_pass());

  const auto cf = audit(Method::kCounterfactual, f.features, *f.game);
  CHECK_FALSE(cf.efficiency.pass);
  CHECK(cf.symmetry_pass());
}

TEST_CASE("stochastic trials break exact efficiency") {
  const auto f = load_game_fixture(SHAPKIT_FIXTURE_DIR "/games/partner_overlap.json");
  const auto trials = stochastic_efficiency_trials(f.game, f.features, 0.1, 30, 42, 1e-6);
  CHECK(trials.trials == 30);
  CHECK(trials.residuals.size() == 30);
  CHECK(trials.violations >= 29);
  const auto silent = stochastic_efficiency_trials(f.game, f.features, 0.0, 5, 42, 1e-9);
  CHECK(silent.violations == 0);
}

TEST_CASE("compliance matrix reproduces the expected pattern") {
  const auto matrix = compliance_matrix(all_fixtures());
  CHECK(compare_to_expected(matrix).empty());
  CHECK(matrix.row(Method::kCached).efficiency.mark == Mark::kSatisfied);
  CHECK(matrix.row(Method::kSlidingWindow).symmetry.mark == Mark::kViolated);
  CHECK(matrix.row(Method::kSlidingWindow).null_player.mark == Mark::kSatisfied);
  CHECK(matrix.row(Method::kCounterfactual).efficiency.mark == Mark::kViolated);
  CHECK(matrix.row(Method::kExact).stochastic_efficiency.has_value());
  const auto text = render_table(matrix);
  CHECK(text.find("sliding_window") != std::string::npos);
  const auto doc = to_json(matrix);
  CHECK(doc.contains("rows"));
  CHECK_THROWS_AS(compliance_matrix({}), InvalidArgument);
}

TEST_CASE("a matrix that deviates is reported") {
  // Only the pair game: symmetry is judged but null player is not.
  auto fixtures = all_fixtures();
  fixtures.erase(fixtures.begin() + 2);
  fixtures.erase(fixtures.begin());
  const auto matrix = compliance_matrix(fixtures);
  CHECK(matrix.row(Method::kCached).null_player.mark == Mark::kNotJudged);
  CHECK_FALSE(compare_to_expected(matrix).empty());
}
