#include "shapkit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shapkit {

namespace {

void require_deterministic(const PayoffSource& source, const char* what) {
  if (!source.is_deterministic()) {
    throw NonDeterministicSource(std::string(what) + " needs a deterministic source, got " +
                                 source.description());
  }
}

// Payoff of every coalition, indexed by position mask.
std::vector<double> payoff_table(PayoffSource& source, const FeatureSet& features) {
  const std::size_t n = features.size();
  if (n > kAuditFeatureLimit) throw FeatureLimitExceeded(n, kAuditFeatureLimit);
  std::vector<double> table(std::size_t{1} << n);
  for (CoalitionMask mask = 0; mask < table.size(); ++mask) {
    table[mask] = source.evaluate(Coalition::from_mask(features, mask));
  }
  return table;
}

// Stored table constants compare exactly; anything else within tolerance.
auto payoff_equality(const PayoffSource& source, double tolerance) {
  const bool exact = dynamic_cast<const TableGame*>(&source) != nullptr;
  return [exact, tolerance](double a, double b) {
    return exact ? a == b : std::abs(a - b) <= tolerance;
  };
}

double score_of(const AttributionResult& result, FeatureId id) {
  auto it = result.scores.find(id);
  if (it == result.scores.end()) {
    throw InvalidArgument("result has no score for feature " + std::to_string(id));
  }
  return it->second;
}

std::string fmt_double(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

const std::string& label_of(const FeatureSet& features, FeatureId id) {
  return features[*features.index_of(id)].label;
}

// Display width of a UTF-8 string (code points; all marks used are narrow).
std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string pad(const std::string& s, std::size_t width) {
  const std::size_t w = display_width(s);
  return w >= width ? s : s + std::string(width - w, ' ');
}

std::string_view symbol(Mark mark) {
  switch (mark) {
    case Mark::kSatisfied:
      return "✓";
    case Mark::kViolated:
      return "✗";
    case Mark::kNotJudged:
      return "-";
  }
  return "?";
}

bool enough_stochastic_violations(const StochasticEfficiency& s) {
  return s.trials > 0 && s.violations * 100 >= s.trials * 95;
}

}  // namespace

bool AuditReport::symmetry_pass() const {
  return std::all_of(symmetry.begin(), symmetry.end(),
                     [](const SymmetryCheck& c) { return !c.antecedent_holds || c.pass; });
}

bool AuditReport::null_player_pass() const {
  return std::all_of(null_player.begin(), null_player.end(),
                     [](const NullPlayerCheck& c) { return !c.is_null || c.pass; });
}

std::size_t AuditReport::judged_symmetry() const {
  return static_cast<std::size_t>(std::count_if(
      symmetry.begin(), symmetry.end(), [](const SymmetryCheck& c) { return c.antecedent_holds; }));
}

std::size_t AuditReport::judged_null_players() const {
  return static_cast<std::size_t>(std::count_if(
      null_player.begin(), null_player.end(), [](const NullPlayerCheck& c) { return c.is_null; }));
}

EfficiencyCheck check_efficiency(const AttributionResult& result, PayoffSource& source,
                                 const FeatureSet& features, double tolerance) {
  require_deterministic(source, "the efficiency check");
  const double grand = source.evaluate(Coalition::all(features));
  const double baseline = source.evaluate(Coalition());
  EfficiencyCheck check;
  check.residual = std::abs(result.sum() - (grand - baseline));
  check.pass = check.residual <= tolerance;
  return check;
}

std::vector<SymmetryCheck> check_symmetry(const FeatureSet& features, PayoffSource& source,
                                          const AttributionResult& result, double tolerance) {
  require_deterministic(source, "the symmetry check");
  const auto table = payoff_table(source, features);
  const auto equal = payoff_equality(source, tolerance);
  const std::size_t n = features.size();
  const CoalitionMask full = table.size() - 1;

  std::vector<SymmetryCheck> checks;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const CoalitionMask bi = CoalitionMask{1} << i;
      const CoalitionMask bj = CoalitionMask{1} << j;
      const CoalitionMask rest = full & ~(bi | bj);
      bool holds = true;
      // every subset of `rest`, via the standard submask walk
      for (CoalitionMask s = rest;; s = (s - 1) & rest) {
        if (!equal(table[s | bi], table[s | bj])) {
          holds = false;
          break;
        }
        if (s == 0) break;
      }
      SymmetryCheck check;
      check.pair = {features[i].id, features[j].id};
      check.antecedent_holds = holds;
      check.score_gap = std::abs(score_of(result, features[i].id) - score_of(result, features[j].id));
      check.pass = !holds || check.score_gap <= tolerance;
      checks.push_back(check);
    }
  }
  return checks;
}

std::vector<NullPlayerCheck> check_null_player(const FeatureSet& features, PayoffSource& source,
                                               const AttributionResult& result,
                                               double tolerance) {
  require_deterministic(source, "the null-player check");
  const auto table = payoff_table(source, features);
  const auto equal = payoff_equality(source, tolerance);
  const CoalitionMask full = table.size() - 1;

  std::vector<NullPlayerCheck> checks;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const CoalitionMask bi = CoalitionMask{1} << i;
    const CoalitionMask rest = full & ~bi;
    bool is_null = true;
    for (CoalitionMask s = rest;; s = (s - 1) & rest) {
      if (!equal(table[s | bi], table[s])) {
        is_null = false;
        break;
      }
      if (s == 0) break;
    }
    NullPlayerCheck check;
    check.id = features[i].id;
    check.is_null = is_null;
    check.score = score_of(result, check.id);
    check.pass = !is_null || std::abs(check.score) <= tolerance;
    checks.push_back(check);
  }
  return checks;
}

AuditReport audit(Method method, const FeatureSet& features, PayoffSource& source,
                  const AuditOptions& options) {
  require_deterministic(source, "an axiom audit");
  AttributionResult result;
  switch (method) {
    case Method::kExact:
      result = attribute_exact(source, features);
      break;
    case Method::kCached:
      result = attribute_cached(source, features);
      break;
    case Method::kSlidingWindow:
      // Smaller fixtures are audited with the widest window they admit.
      result = attribute_sliding_window(source, features,
                                        std::min(options.window_size, features.size()), false,
                                        options.window_context);
      break;
    case Method::kCounterfactual:
      result = attribute_counterfactual(source, features);
      break;
    case Method::kOracle:
      result = attribute_oracle(source, features);
      break;
  }
  AuditReport report;
  report.method = method;
  report.tolerance = options.tolerance;
  report.efficiency = check_efficiency(result, source, features, options.tolerance);
  report.symmetry = check_symmetry(features, source, result, options.tolerance);
  report.null_player = check_null_player(features, source, result, options.tolerance);
  return report;
}

StochasticEfficiency stochastic_efficiency_trials(std::shared_ptr<PayoffSource> base,
                                                  const FeatureSet& features, double noise_std,
                                                  std::size_t trials, std::uint64_t seed,
                                                  double tolerance) {
  StochasticEfficiency out;
  out.trials = trials;
  out.residuals.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    NoisyGame noisy(base, noise_std, seed + t);
    const auto result = attribute_exact(noisy, features);
    // Both endpoints are always drawn by the exact method.
    const double residual = std::abs(result.sum() - (*result.grand - *result.baseline));
    out.residuals.push_back(residual);
    if (residual > tolerance) ++out.violations;
  }
  return out;
}

std::string_view to_string(Mark mark) {
  switch (mark) {
    case Mark::kSatisfied:
      return "satisfied";
    case Mark::kViolated:
      return "violated";
    case Mark::kNotJudged:
      return "not_judged";
  }
  return "unknown";
}

const MatrixRow& ComplianceMatrix::row(Method method) const {
  for (const auto& r : rows) {
    if (r.method == method) return r;
  }
  throw InvalidArgument("matrix has no row for " + std::string(to_string(method)));
}

ComplianceMatrix compliance_matrix(const std::vector<GameFixture>& fixtures,
                                   const AuditOptions& options) {
  if (fixtures.empty()) throw InvalidArgument("the compliance matrix needs at least one fixture");
  if (options.noisy_fixture >= fixtures.size()) {
    throw InvalidArgument("noisy_fixture index out of range");
  }

  ComplianceMatrix matrix;
  matrix.options = options;
  for (const auto& f : fixtures) matrix.fixtures.push_back(f.name);

  auto record = [](MatrixCell& cell, bool judged, bool pass, const std::string& witness) {
    if (!judged) return;
    ++cell.judged;
    if (!pass && cell.mark != Mark::kViolated) {
      cell.mark = Mark::kViolated;
      cell.witness = witness;
    } else if (pass && cell.mark == Mark::kNotJudged) {
      cell.mark = Mark::kSatisfied;
    }
  };

  for (Method method :
       {Method::kExact, Method::kCached, Method::kSlidingWindow, Method::kCounterfactual}) {
    MatrixRow row;
    row.method = method;
    for (const auto& fixture : fixtures) {
      auto report = audit(method, fixture.features, *fixture.game, options);
      record(row.efficiency, true, report.efficiency.pass,
             fixture.name + ": residual " + fmt_double(report.efficiency.residual));
      for (const auto& s : report.symmetry) {
        record(row.symmetry, s.antecedent_holds, s.pass,
               fixture.name + ": pair (" + label_of(fixture.features, s.pair.first) + ", " +
                   label_of(fixture.features, s.pair.second) + ") gap " + fmt_double(s.score_gap));
      }
      for (const auto& c : report.null_player) {
        record(row.null_player, c.is_null, c.pass,
               fixture.name + ": null feature " + label_of(fixture.features, c.id) + " scored " +
                   fmt_double(c.score));
      }
      matrix.reports.emplace_back(fixture.name, std::move(report));
    }
    if (method == Method::kExact && options.noisy_trials > 0) {
      const auto& base = fixtures[options.noisy_fixture];
      row.stochastic_efficiency =
          stochastic_efficiency_trials(base.game, base.features, options.noise_std,
                                       options.noisy_trials, options.seed, options.tolerance);
    }
    matrix.rows.push_back(std::move(row));
  }
  return matrix;
}

std::vector<PatternMismatch> compare_to_expected(const ComplianceMatrix& matrix) {
  struct Expected {
    Method method;
    Mark efficiency, symmetry, null_player;
  };
  static constexpr Expected kExpected[] = {
      {Method::kExact, Mark::kSatisfied, Mark::kSatisfied, Mark::kSatisfied},
      {Method::kCached, Mark::kSatisfied, Mark::kSatisfied, Mark::kSatisfied},
      {Method::kSlidingWindow, Mark::kViolated, Mark::kViolated, Mark::kSatisfied},
      {Method::kCounterfactual, Mark::kViolated, Mark::kSatisfied, Mark::kSatisfied},
  };

  std::vector<PatternMismatch> mismatches;
  auto compare = [&](Method m, const char* axiom, Mark expected, Mark observed) {
    if (expected != observed) {
      mismatches.push_back({m, axiom, std::string(to_string(expected)),
                            std::string(to_string(observed))});
    }
  };
  for (const auto& e : kExpected) {
    const auto& row = matrix.row(e.method);
    compare(e.method, "efficiency", e.efficiency, row.efficiency.mark);
    compare(e.method, "symmetry", e.symmetry, row.symmetry.mark);
    compare(e.method, "null_player", e.null_player, row.null_player.mark);
    if (e.method == Method::kExact) {
      const auto& s = row.stochastic_efficiency;
      if (!s || !enough_stochastic_violations(*s)) {
        mismatches.push_back(
            {e.method, "efficiency_stochastic", "violated in >= 95% of trials",
             s ? std::to_string(s->violations) + "/" + std::to_string(s->trials) : "not run"});
      }
    }
  }
  return mismatches;
}

nlohmann::json to_json(const AuditReport& report) {
  nlohmann::json symmetry = nlohmann::json::array();
  for (const auto& s : report.symmetry) {
    symmetry.push_back({{"pair", {s.pair.first, s.pair.second}},
                        {"antecedent_holds", s.antecedent_holds},
                        {"score_gap", s.score_gap},
                        {"pass", s.pass}});
  }
  nlohmann::json nulls = nlohmann::json::array();
  for (const auto& c : report.null_player) {
    nulls.push_back(
        {{"id", c.id}, {"is_null", c.is_null}, {"score", c.score}, {"pass", c.pass}});
  }
  return {{"method", to_string(report.method)},
          {"efficiency",
           {{"residual", report.efficiency.residual}, {"pass", report.efficiency.pass}}},
          {"symmetry", std::move(symmetry)},
          {"null_player", std::move(nulls)},
          {"tolerance", report.tolerance}};
}

nlohmann::json to_json(const ComplianceMatrix& matrix) {
  auto cell_json = [](const MatrixCell& c) {
    nlohmann::json j = {{"mark", to_string(c.mark)}, {"judged", c.judged}};
    if (!c.witness.empty()) j["witness"] = c.witness;
    return j;
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : matrix.rows) {
    nlohmann::json row = {{"method", to_string(r.method)},
                          {"efficiency", cell_json(r.efficiency)},
                          {"symmetry", cell_json(r.symmetry)},
                          {"null_player", cell_json(r.null_player)}};
    if (r.stochastic_efficiency) {
      row["efficiency_stochastic"] = {{"trials", r.stochastic_efficiency->trials},
                                      {"violations", r.stochastic_efficiency->violations}};
    }
    rows.push_back(std::move(row));
  }
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& [fixture, report] : matrix.reports) {
    auto j = to_json(report);
    j["fixture"] = fixture;
    reports.push_back(std::move(j));
  }
  const auto& o = matrix.options;
  return {{"fixtures", matrix.fixtures},
          {"options",
           {{"tolerance", o.tolerance},
            {"window_size", o.window_size},
            {"window_context", to_string(o.window_context)},
            {"noisy_trials", o.noisy_trials},
            {"noise_std", o.noise_std},
            {"seed", o.seed}}},
          {"rows", std::move(rows)},
          {"reports", std::move(reports)}};
}

std::string render_table(const ComplianceMatrix& matrix) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Method", "Efficiency", "Symmetry", "Null player (dummy)"});
  for (const auto& r : matrix.rows) {
    std::string efficiency(symbol(r.efficiency.mark));
    if (r.stochastic_efficiency) {
      efficiency += " deterministic, ";
      efficiency += symbol(enough_stochastic_violations(*r.stochastic_efficiency)
                               ? Mark::kViolated
                               : Mark::kSatisfied);
      efficiency += " redraws (" + std::to_string(r.stochastic_efficiency->violations) + "/" +
                    std::to_string(r.stochastic_efficiency->trials) + " broken)";
    }
    cells.push_back({std::string(to_string(r.method)), efficiency,
                     std::string(symbol(r.symmetry.mark)),
                     std::string(symbol(r.null_player.mark))});
  }
  std::vector<std::size_t> widths(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], display_width(row[c]));
    }
  }
  std::ostringstream out;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c + 1 == row.size() ? row[c] : pad(row[c], widths[c] + 2));
    }
    out << '\n';
  }
  for (const auto& r : matrix.rows) {
    for (const auto* cell : {&r.efficiency, &r.symmetry, &r.null_player}) {
      if (cell->mark == Mark::kViolated) {
        out << "  " << to_string(r.method) << " witness: " << cell->witness << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace shapkit
