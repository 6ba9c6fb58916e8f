// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "shapkit/attribution.hpp"
#include "shapkit/audit.hpp"
#include "shapkit/cli/commands.hpp"
#include "shapkit/fixture.hpp"
#include "shapkit/llm/dataset.hpp"
#include "support/oracles.hpp"

using namespace shapkit;

namespace {

// Tolerances and budgets.
constexpr double kExactValueTol = 1e-12;
constexpr double kOracleTol = 1e-9;
constexpr double kEfficiencyTol = 1e-9;
constexpr double kRedrawResidual = 1e-6;
constexpr double kReductionTol = 1e-12;
constexpr double kReplaySimilarityTol = 1e-9;
constexpr double kAuditBudgetSeconds = 1.0;
constexpr double kOracleBudgetSeconds = 10.0;
constexpr double kReplayBudgetSeconds = 5.0;

const std::string kFixtures = SHAPKIT_FIXTURE_DIR;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass;
  std::string detail;
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

std::string num(double v) { return cli::format_number(v); }

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Random games shared by criteria 4 and 5: n cycles through 2..6.
struct RandomGame {
  std::size_t n;
  oracle::PayoffVector payoffs;
};

std::vector<RandomGame> random_games(std::size_t count, std::uint64_t seed0) {
  std::vector<RandomGame> games;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t n = 2 + k % 5;
    games.push_back({n, oracle::random_payoffs(n, seed0 + k)});
  }
  return games;
}

Verdict compliance_pattern() {
  std::ostringstream out, err;
  const auto start = Clock::now();
  const int code = cli::run({"audit", "--game", kFixtures + "/games/partner_overlap.json",
                             "--game", kFixtures + "/games/pair_synergy.json", "--game",
                             kFixtures + "/games/dummy_and_twins.json"},
                            out, err);
  const double elapsed = seconds_since(start);
  const bool matches = code == 0 && out.str().find("matches the expected") != std::string::npos;
  return {matches && elapsed < kAuditBudgetSeconds,
          "exit " + std::to_string(code) + ", " + num(elapsed) + " s"};
}

Verdict window_counterexample() {
  const auto f = load_game_fixture(kFixtures + "/games/partner_overlap.json");
  const auto result =
      attribute_sliding_window(*f.game, f.features, 2, true, WindowContext::kRestricted);
  const double diff = max_abs_diff(result.score_vector(f.features), {0.5, 0.5, 0.25, 0.0});
  const double span = f.game->evaluate(Coalition::all(f.features)) -
                      f.game->evaluate(Coalition{});
  const bool pass = diff <= kExactValueTol && std::abs(result.sum() - 1.25) <= kExactValueTol &&
                    span == 2.0;
  return {pass, "max diff " + num(diff) + ", sum " + num(result.sum()) + ", span " + num(span)};
}

Verdict counterfactual_counterexample() {
  const auto f = load_game_fixture(kFixtures + "/games/pair_synergy.json");
  const auto result = attribute_counterfactual(*f.game, f.features);
  const auto scores = result.score_vector(f.features);
  const double span = f.game->evaluate(Coalition::all(f.features)) -
                      f.game->evaluate(Coalition{});
  const bool pass = scores == std::vector<double>{1.0, 1.0} && result.sum() == 2.0 && span == 1.0;
  return {pass, "scores (" + num(scores[0]) + ", " + num(scores[1]) + "), sum " +
                    num(result.sum()) + ", span " + num(span)};
}

Verdict oracle_equivalence() {
  const auto start = Clock::now();
  double worst = 0.0;
  double worst_reference = 0.0;
  for (const auto& g : random_games(50, 1000)) {
    auto game = oracle::to_table_game(g.payoffs, g.n);
    const auto fs = oracle::numbered_features(g.n);
    const auto exact = attribute_exact(*game, fs).score_vector(fs);
    worst = std::max(worst, max_abs_diff(exact, attribute_oracle(*game, fs).score_vector(fs)));
    worst_reference =
        std::max(worst_reference, max_abs_diff(exact, oracle::shapley_permutations(g.payoffs, g.n)));
  }
  const double elapsed = seconds_since(start);
  return {worst <= kOracleTol && worst_reference <= kOracleTol && elapsed < kOracleBudgetSeconds,
          "max diff " + num(worst) + " (independent reference " + num(worst_reference) + "), " +
              num(elapsed) + " s"};
}

Verdict cached_efficiency() {
  double worst = 0.0;
  std::size_t cases = 0;
  for (const auto& g : random_games(50, 1000)) {
    auto game = oracle::to_table_game(g.payoffs, g.n);
    const auto fs = oracle::numbered_features(g.n);
    const auto result = attribute_cached(*game, fs);
    const double span = g.payoffs.back() - g.payoffs.front();
    worst = std::max(worst, std::abs(result.sum() - span));
    ++cases;
  }
  for (const auto& g : random_games(20, 2000)) {
    NoisyGame noisy(oracle::to_table_game(g.payoffs, g.n), 0.1, cases);
    CachingWrapper cache(noisy);
    const auto fs = oracle::numbered_features(g.n);
    const auto result = attribute_cached(cache, fs);
    // The span of the frozen draws the scores were computed from.
    const double span = *cache.lookup(Coalition::all(fs)) - *cache.lookup(Coalition{});
    worst = std::max(worst, std::abs(result.sum() - span));
    ++cases;
  }
  return {worst <= kEfficiencyTol,
          std::to_string(cases) + " games, max residual " + num(worst)};
}

Verdict redraw_violation() {
  const auto f = load_game_fixture(kFixtures + "/games/partner_overlap.json");
  const auto trials = stochastic_efficiency_trials(f.game, f.features, 0.1, 100, 42, kRedrawResidual);
  return {f.features.size() == 4 && trials.trials == 100 && trials.violations >= 95,
          std::to_string(trials.violations) + "/100 trials with residual > " + num(kRedrawResidual)};
}

Verdict reductions() {
  double worst_full = 0.0;
  double worst_single = 0.0;
  for (const auto& g : random_games(20, 3000)) {
    auto game = oracle::to_table_game(g.payoffs, g.n);
    const auto fs = oracle::numbered_features(g.n);
    const auto exact = attribute_exact(*game, fs).score_vector(fs);
    const auto cf = attribute_counterfactual(*game, fs).score_vector(fs);
    worst_full = std::max(
        worst_full, max_abs_diff(attribute_sliding_window(*game, fs, g.n).score_vector(fs), exact));
    worst_single = std::max(
        worst_single, max_abs_diff(attribute_sliding_window(*game, fs, 1).score_vector(fs), cf));
  }
  return {worst_full <= kReductionTol && worst_single <= kReductionTol,
          "w=n max diff " + num(worst_full) + ", w=1 max diff " + num(worst_single)};
}

Verdict call_counts() {
  std::size_t checked = 0;
  std::string first_failure;
  auto expect = [&](const std::string& what, std::size_t got, std::uint64_t want) {
    ++checked;
    if (got != want && first_failure.empty()) {
      first_failure = what + ": " + std::to_string(got) + " != " + std::to_string(want);
    }
  };
  for (std::size_t n = 2; n <= 10; ++n) {
    const auto v = oracle::random_payoffs(n, n);
    auto game = oracle::to_table_game(v, n);
    const auto fs = oracle::numbered_features(n);
    const std::string at = " n=" + std::to_string(n);
    expect("exact" + at, attribute_exact(*game, fs).call_stats.inference_calls, n << n);
    expect("cached" + at, attribute_cached(*game, fs).call_stats.inference_calls, 1ULL << n);
    expect("counterfactual" + at, attribute_counterfactual(*game, fs).call_stats.inference_calls,
           n + 1);
    for (std::size_t w = 1; w <= n; ++w) {
      expect("sliding_window" + at + " w=" + std::to_string(w),
             attribute_sliding_window(*game, fs, w, false).call_stats.inference_calls,
             (n - w + 1) * w * (1ULL << w));
    }
  }
  return {first_failure.empty(), first_failure.empty()
                                     ? std::to_string(checked) + " counts match"
                                     : first_failure};
}

Verdict pipeline_replay() {
  const auto dir = std::filesystem::temp_directory_path() / "shapkit_acceptance";
  std::filesystem::create_directories(dir);
  const std::string pipeline = kFixtures + "/pipeline/";
  auto compare = [&](const std::filesystem::path& out_path, const std::filesystem::path& report) {
    std::ostringstream out, err;
    return cli::run({"compare", "--dataset", pipeline + "dataset_n5.csv", "--transcript",
                     pipeline + "transcript_n5.jsonl", "--mode", "replay", "--deterministic",
                     "--methods", "cached,sliding_window,counterfactual", "--window-size", "3",
                     "--out", out_path.string(), "--report", report.string()},
                    out, err);
  };
  const auto dataset = llm::ingest_dataset(pipeline + "dataset_n5.csv");
  const bool one_instance =
      dataset.instances.size() == 1 && dataset.instances.front().features.size() == 5;

  const auto start = Clock::now();
  const int first = compare(dir / "run1.csv", dir / "run1.json");
  const double elapsed = seconds_since(start);
  const int second = compare(dir / "run2.csv", dir / "run2.json");
  const auto a = slurp(dir / "run1.csv");
  const bool identical = first == 0 && second == 0 && !a.empty() && a == slurp(dir / "run2.csv");

  // cached-vs-exact similarity, read back from the per-instance row.
  double similarity = NAN;
  std::istringstream lines(a);
  for (std::string line; std::getline(lines, line);) {
    const auto cells = llm::split_csv_line(line);
    if (cells.size() == 7 && cells[0] == "instance" && cells[4] == "cached") {
      similarity = std::stod(cells[5]);
    }
  }
  const bool pass = one_instance && identical && elapsed < kReplayBudgetSeconds &&
                    std::abs(similarity - 1.0) <= kReplaySimilarityTol;
  return {pass, std::string(identical ? "byte-identical" : "outputs differ") + ", " +
                    num(elapsed) + " s, cached vs exact similarity " + num(similarity)};
}

Verdict bench_growth() {
  const auto csv_path = std::filesystem::temp_directory_path() / "shapkit_acceptance_bench.csv";
  std::map<std::pair<std::string, std::size_t>, std::uint64_t> calls;
  std::string problem;
  for (const std::string w : {"2", "3"}) {
    std::ostringstream out, err;
    const int code = cli::run({"bench", "--window-size", w, "--n-min", "2", "--n-max", "10",
                               "--runs", "1", "--seed", "7", "--out", csv_path.string()},
                              out, err);
    if (code != 0) return {false, "bench exited " + std::to_string(code)};
    std::istringstream lines(slurp(csv_path));
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
      const auto cells = llm::split_csv_line(line);
      std::string method = cells[0];
      if (method == "sliding_window") method += "_w" + cells[2];
      calls[{method, std::stoul(cells[1])}] = std::stoull(cells[3]);
    }
  }
  auto at = [&](const std::string& m, std::size_t n) { return calls.at({m, n}); };
  std::size_t checked = 0;
  auto expect = [&](bool ok, const std::string& what) {
    ++checked;
    if (!ok && problem.empty()) problem = what;
  };
  for (std::size_t n = 3; n <= 10; ++n) {
    const std::string where = " at n=" + std::to_string(n);
    // Exponential: cached doubles; exact grows by 2n/(n-1).
    expect(at("cached", n) == 2 * at("cached", n - 1), "cached not doubling" + where);
    expect(at("exact", n) * (n - 1) == 2 * n * at("exact", n - 1), "exact not ~2^n" + where);
    // Linear: constant first differences.
    expect(at("counterfactual", n) - at("counterfactual", n - 1) == 1,
           "counterfactual not linear" + where);
    for (std::size_t w : {2u, 3u}) {
      if (n <= w) continue;
      const std::string m = "sliding_window_w" + std::to_string(w);
      expect(at(m, n) - at(m, n - 1) == w << w, m + " not linear" + where);
    }
  }
  return {problem.empty(), problem.empty() ? std::to_string(checked) + " growth checks" : problem};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"compliance matrix pattern via audit", compliance_pattern},
      {"sliding-window counterexample values (restricted windows)", window_counterexample},
      {"counterfactual counterexample", counterfactual_counterexample},
      {"exact matches permutation oracle on 50 games", oracle_equivalence},
      {"cached efficiency on 50 table + 20 noisy games", cached_efficiency},
      {"exact efficiency breaks under redraws", redraw_violation},
      {"sliding-window reductions to exact and counterfactual", reductions},
      {"call-count closed forms", call_counts},
      {"offline pipeline replay", pipeline_replay},
      {"call-count growth in bench CSV", bench_growth},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
