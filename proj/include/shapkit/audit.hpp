#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shapkit/attribution.hpp"
#include "shapkit/fixture.hpp"

namespace shapkit {

inline constexpr double kDefaultAuditTolerance = 1e-9;
/// Largest feature count for which antecedents are verified exhaustively.
inline constexpr std::size_t kAuditFeatureLimit = 12;

struct EfficiencyCheck {
  /// |sum of scores - (h(X) - h(empty))|
  double residual = 0.0;
  bool pass = false;
};

struct SymmetryCheck {
  std::pair<FeatureId, FeatureId> pair;
  bool antecedent_holds = false;
  double score_gap = 0.0;
  /// Meaningful only when the antecedent holds.
  bool pass = true;
};

struct NullPlayerCheck {
  FeatureId id = 0;
  bool is_null = false;
  double score = 0.0;
  /// Meaningful only for null players.
  bool pass = true;
};

struct AuditReport {
  Method method = Method::kExact;
  EfficiencyCheck efficiency;
  std::vector<SymmetryCheck> symmetry;
  std::vector<NullPlayerCheck> null_player;
  double tolerance = kDefaultAuditTolerance;

  bool symmetry_pass() const;
  bool null_player_pass() const;
  std::size_t judged_symmetry() const;
  std::size_t judged_null_players() const;
};

/// Efficiency against fresh evaluations of `source`, which must be
/// deterministic (a CachingWrapper from a cached run qualifies).
EfficiencyCheck check_efficiency(const AttributionResult& result, PayoffSource& source,
                                 const FeatureSet& features,
                                 double tolerance = kDefaultAuditTolerance);

/// All pairs, in feature order. The antecedent is checked over every
/// S subset of X \ {i, j}; table payoffs are compared exactly, other sources
/// within `tolerance`.
std::vector<SymmetryCheck> check_symmetry(const FeatureSet& features, PayoffSource& source,
                                          const AttributionResult& result,
                                          double tolerance = kDefaultAuditTolerance);

std::vector<NullPlayerCheck> check_null_player(const FeatureSet& features, PayoffSource& source,
                                               const AttributionResult& result,
                                               double tolerance = kDefaultAuditTolerance);

struct AuditOptions {
  double tolerance = kDefaultAuditTolerance;
  std::size_t window_size = 2;
  WindowContext window_context = WindowContext::kHeld;
  /// Stochastic exact-method trials (independent redraws).
  std::size_t noisy_trials = 100;
  double noise_std = 0.1;
  std::uint64_t seed = 42;
  /// Fixture used as the base game of the stochastic trials.
  std::size_t noisy_fixture = 0;
};

/// Runs `method` on a deterministic game and checks all three axioms.
AuditReport audit(Method method, const FeatureSet& features, PayoffSource& source,
                  const AuditOptions& options = {});

struct StochasticEfficiency {
  std::size_t trials = 0;
  /// Trials whose residual against the last observed h(X), h(empty) exceeded the tolerance.
  std::size_t violations = 0;
  std::vector<double> residuals;
};

/// Repeats the exact method on NoisyGame(base, noise_std, seed + trial).
StochasticEfficiency stochastic_efficiency_trials(std::shared_ptr<PayoffSource> base,
                                                  const FeatureSet& features, double noise_std,
                                                  std::size_t trials, std::uint64_t seed,
                                                  double tolerance);

enum class Mark { kSatisfied, kViolated, kNotJudged };

std::string_view to_string(Mark mark);

struct MatrixCell {
  Mark mark = Mark::kNotJudged;
  std::size_t judged = 0;
  /// Fixture and detail of the first violation, when violated.
  std::string witness;
};

struct MatrixRow {
  Method method = Method::kExact;
  MatrixCell efficiency;
  MatrixCell symmetry;
  MatrixCell null_player;
  /// Exact method only: efficiency under independent redraws.
  std::optional<StochasticEfficiency> stochastic_efficiency;
};

struct ComplianceMatrix {
  std::vector<MatrixRow> rows;
  std::vector<std::string> fixtures;
  AuditOptions options;
  /// Per-fixture, per-method reports backing the cells.
  std::vector<std::pair<std::string, AuditReport>> reports;

  const MatrixRow& row(Method method) const;
};

/// Audits exact, cached, sliding_window and counterfactual on every fixture.
/// A cell is violated if any fixture witnesses a violation, satisfied if at
/// least one judged check exists and all pass, and not judged otherwise.
/// Throws InvalidArgument on an empty fixture list.
ComplianceMatrix compliance_matrix(const std::vector<GameFixture>& fixtures,
                                   const AuditOptions& options = {});

/// Expected pattern: cached satisfies all three axioms; exact satisfies
/// symmetry and null player, satisfies efficiency on deterministic games and
/// breaks it in at least 95% of stochastic trials; sliding window breaks
/// efficiency and symmetry but keeps null player; counterfactual breaks
/// efficiency only.
struct PatternMismatch {
  Method method;
  std::string axiom;
  std::string expected;
  std::string observed;
};

std::vector<PatternMismatch> compare_to_expected(const ComplianceMatrix& matrix);

nlohmann::json to_json(const AuditReport& report);
nlohmann::json to_json(const ComplianceMatrix& matrix);

/// Aligned text table, one row per method.
std::string render_table(const ComplianceMatrix& matrix);

}  // namespace shapkit
