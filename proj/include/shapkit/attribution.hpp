#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "shapkit/caching.hpp"
#include "shapkit/error.hpp"
#include "shapkit/feature.hpp"
#include "shapkit/payoff.hpp"

namespace shapkit {

enum class Method { kExact, kCached, kSlidingWindow, kCounterfactual, kOracle };

std::string_view to_string(Method method);
/// Accepts the tags produced by to_string. Throws InvalidArgument.
Method parse_method(std::string_view tag);

/// What happens to features outside the current window in sliding-window
/// attribution.
enum class WindowContext {
  /// Out-of-window features are present in every evaluated coalition.
  kHeld,
  /// Each window is scored as a standalone sub-game; out-of-window features
  /// are absent from every evaluated coalition.
  kRestricted,
};

std::string_view to_string(WindowContext context);
WindowContext parse_window_context(std::string_view tag);

struct CallStats {
  std::size_t inference_calls = 0;
  std::size_t cache_hits = 0;
};

struct AttributionResult {
  Method method = Method::kExact;
  /// One score per feature, keyed by feature id.
  std::map<FeatureId, double> scores;
  /// Last observed payoff of the empty coalition, if the method evaluated it.
  std::optional<double> baseline;
  /// Last observed payoff of the grand coalition, if the method evaluated it.
  std::optional<double> grand;
  std::optional<std::size_t> window_size;
  std::optional<WindowContext> window_context;
  std::size_t sample_count = 1;
  CallStats call_stats;
  double wall_time_seconds = 0.0;

  double sum() const;
  /// Scores in FeatureSet order.
  std::vector<double> score_vector(const FeatureSet& features) const;
};

/// Scores keyed by feature label.
nlohmann::json to_json(const AttributionResult& result, const FeatureSet& features,
                       bool include_timing = true);

/// A payoff-source failure in the middle of an attribution run.
class AttributionAborted : public Error {
 public:
  AttributionAborted(const std::string& what, CallStats partial)
      : Error(what), partial_(partial) {}

  /// Calls made up to and including the one that failed.
  const CallStats& partial_stats() const noexcept { return partial_; }

 private:
  CallStats partial_;
};

struct AttributionOptions {
  /// Largest feature count the exhaustive methods accept.
  std::size_t exhaustive_limit = 20;
  /// Concurrent coalition evaluations. Stochastic runs replay only with 1.
  std::size_t workers = 1;
  /// Draws averaged per coalition evaluation.
  std::size_t samples = 1;
};

/// Shapley weight |S|!(n-|S|-1)!/n!, computed as 1/(n * C(n-1, s)).
/// Throws InvalidArgument unless 0 <= s < n.
double shapley_weight(std::size_t coalition_size, std::size_t total_features);

/// Exact Shapley values with every coalition payoff drawn fresh from `source`
/// (no reuse across terms); n * 2^n inference calls.
AttributionResult attribute_exact(PayoffSource& source, const FeatureSet& features,
                                  const AttributionOptions& options = {});

/// Exact Shapley values through a fresh memoizing wrapper; 2^n inference calls.
AttributionResult attribute_cached(PayoffSource& source, const FeatureSet& features,
                                   const AttributionOptions& options = {});

/// As above, but through a caller-owned wrapper, so the frozen payoffs stay
/// inspectable after the run. Stats count only calls made by this run.
AttributionResult attribute_cached(CachingWrapper& cache, const FeatureSet& features,
                                   const AttributionOptions& options = {});

/// Stride-1 sliding-window Shapley values, averaged over the windows that
/// contain each feature. Weights use the window size in place of n.
AttributionResult attribute_sliding_window(PayoffSource& source, const FeatureSet& features,
                                           std::size_t window_size, bool use_cache = true,
                                           WindowContext context = WindowContext::kHeld,
                                           const AttributionOptions& options = {});

/// Leave-one-out effect h(X) - h(X \ {x}); n + 1 inference calls.
AttributionResult attribute_counterfactual(PayoffSource& source, const FeatureSet& features,
                                           const AttributionOptions& options = {});

/// Permutation-average Shapley values over all n! orderings. Independent
/// cross-check for the subset formula; deterministic sources and n <= 8 only.
AttributionResult attribute_oracle(PayoffSource& source, const FeatureSet& features,
                                   const AttributionOptions& options = {});

inline constexpr std::size_t kOracleFeatureLimit = 8;

}  // namespace shapkit
