#include "shapkit/attribution.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace shapkit {

namespace {

// Counts raw draws on the user's source.
class CountingSource final : public PayoffSource {
 public:
  explicit CountingSource(PayoffSource& inner) : inner_(inner) {}

  double evaluate(const Coalition& coalition) override {
    calls_.fetch_add(1);
    return inner_.evaluate(coalition);
  }
  bool is_deterministic() const override { return inner_.is_deterministic(); }
  std::string description() const override { return inner_.description(); }

  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  PayoffSource& inner_;
  std::atomic<std::size_t> calls_{0};
};

// h_n: each evaluation is the mean of n draws.
class SampledSource final : public PayoffSource {
 public:
  SampledSource(PayoffSource& inner, std::size_t samples) : inner_(inner), samples_(samples) {
    if (samples_ == 0) throw InvalidArgument("samples must be at least 1");
  }

  double evaluate(const Coalition& coalition) override {
    return sample_mean_payoff(inner_, coalition, samples_);
  }
  bool is_deterministic() const override { return inner_.is_deterministic(); }
  std::string description() const override { return inner_.description(); }

 private:
  PayoffSource& inner_;
  std::size_t samples_;
};

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

CoalitionMask full_mask(std::size_t n) {
  return n >= 64 ? ~CoalitionMask{0} : (CoalitionMask{1} << n) - 1;
}

CoalitionMask bit(std::size_t i) { return CoalitionMask{1} << i; }

std::size_t popcount(CoalitionMask mask) { return static_cast<std::size_t>(std::popcount(mask)); }

double checked(double value, const Coalition& coalition) {
  if (!std::isfinite(value)) {
    throw Error("payoff source returned a non-finite value for coalition {" + coalition.key() +
                "}");
  }
  return value;
}

// Evaluates every mask, in order when workers <= 1. The first failure stops
// the remaining work and is rethrown after all workers have joined.
std::vector<double> evaluate_masks(PayoffSource& source, const FeatureSet& features,
                                   std::span<const CoalitionMask> masks, std::size_t workers) {
  std::vector<double> values(masks.size());
  if (workers <= 1 || masks.size() <= 1) {
    for (std::size_t i = 0; i < masks.size(); ++i) {
      const auto coalition = Coalition::from_mask(features, masks[i]);
      values[i] = checked(source.evaluate(coalition), coalition);
    }
    return values;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    const std::size_t threads = std::min(workers, masks.size());
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        while (!stop.load()) {
          const std::size_t i = next.fetch_add(1);
          if (i >= masks.size()) return;
          try {
            const auto coalition = Coalition::from_mask(features, masks[i]);
            values[i] = checked(source.evaluate(coalition), coalition);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            stop.store(true);
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return values;
}

// Last observed payoffs of the empty and grand coalitions, in task order.
void observe_endpoints(std::span<const CoalitionMask> masks, std::span<const double> values,
                       CoalitionMask full, AttributionResult& result) {
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (masks[i] == 0) result.baseline = values[i];
    if (masks[i] == full) result.grand = values[i];
  }
}

void check_exhaustive_limit(const FeatureSet& features, const AttributionOptions& options) {
  if (features.size() > options.exhaustive_limit) {
    throw FeatureLimitExceeded(features.size(), options.exhaustive_limit);
  }
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs `body`, converting any failure into AttributionAborted carrying the
// stats gathered so far. The original error stays reachable as nested.
template <typename Body, typename Stats>
void guarded(Body&& body, Stats&& stats) {
  try {
    body();
  } catch (...) {
    std::throw_with_nested(AttributionAborted(
        [] {
          try {
            throw;
          } catch (const std::exception& e) {
            return std::string("attribution aborted: ") + e.what();
          } catch (...) {
            return std::string("attribution aborted");
          }
        }(),
        stats()));
  }
}

// Subset-formula Shapley values; every term draws both payoffs from `source`.
void shapley_terms(PayoffSource& source, const FeatureSet& features,
                   const AttributionOptions& options, AttributionResult& result) {
  const std::size_t n = features.size();
  const CoalitionMask full = full_mask(n);
  std::vector<double> weights(n);
  for (std::size_t s = 0; s < n; ++s) weights[s] = shapley_weight(s, n);

  std::vector<CoalitionMask> tasks;
  tasks.reserve(std::size_t{2} << (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    tasks.clear();
    for (CoalitionMask subset = 0;; ++subset) {
      if (!(subset & bit(i))) {
        tasks.push_back(subset | bit(i));
        tasks.push_back(subset);
      }
      if (subset == full) break;
    }
    const auto values = evaluate_masks(source, features, tasks, options.workers);
    observe_endpoints(tasks, values, full, result);

    CompensatedSum total;
    for (std::size_t t = 0; t < tasks.size(); t += 2) {
      total.add(weights[popcount(tasks[t + 1])] * (values[t] - values[t + 1]));
    }
    result.scores[features[i].id] = total.value();
  }
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kExact:
      return "exact";
    case Method::kCached:
      return "cached";
    case Method::kSlidingWindow:
      return "sliding_window";
    case Method::kCounterfactual:
      return "counterfactual";
    case Method::kOracle:
      return "oracle";
  }
  return "unknown";
}

Method parse_method(std::string_view tag) {
  for (auto m : {Method::kExact, Method::kCached, Method::kSlidingWindow, Method::kCounterfactual,
                 Method::kOracle}) {
    if (tag == to_string(m)) return m;
  }
  throw InvalidArgument("unknown attribution method '" + std::string(tag) + "'");
}

std::string_view to_string(WindowContext context) {
  return context == WindowContext::kHeld ? "held" : "restricted";
}

WindowContext parse_window_context(std::string_view tag) {
  if (tag == "held") return WindowContext::kHeld;
  if (tag == "restricted") return WindowContext::kRestricted;
  throw InvalidArgument("unknown window context '" + std::string(tag) + "'");
}

double AttributionResult::sum() const {
  CompensatedSum total;
  for (const auto& [id, score] : scores) total.add(score);
  return total.value();
}

std::vector<double> AttributionResult::score_vector(const FeatureSet& features) const {
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& f : features) {
    auto it = scores.find(f.id);
    if (it == scores.end()) {
      throw InvalidArgument("result has no score for feature " + std::to_string(f.id));
    }
    out.push_back(it->second);
  }
  return out;
}

nlohmann::json to_json(const AttributionResult& result, const FeatureSet& features,
                       bool include_timing) {
  nlohmann::json scores = nlohmann::json::object();
  for (const auto& f : features) {
    std::string name = f.label;
    if (scores.contains(name)) name += "#" + std::to_string(f.id);
    auto it = result.scores.find(f.id);
    scores[name] = it == result.scores.end() ? nlohmann::json(nullptr) : nlohmann::json(it->second);
  }
  auto optional_number = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json out = {
      {"method", to_string(result.method)},
      {"scores", std::move(scores)},
      {"baseline", optional_number(result.baseline)},
      {"grand", optional_number(result.grand)},
      {"sample_count", result.sample_count},
      {"call_stats",
       {{"inference_calls", result.call_stats.inference_calls},
        {"cache_hits", result.call_stats.cache_hits}}},
  };
  if (result.window_size) out["window_size"] = *result.window_size;
  if (result.window_context) out["window_context"] = to_string(*result.window_context);
  if (include_timing) out["wall_time_seconds"] = result.wall_time_seconds;
  return out;
}

double shapley_weight(std::size_t coalition_size, std::size_t total_features) {
  if (total_features == 0 || coalition_size >= total_features) {
    throw InvalidArgument("shapley_weight needs 0 <= s < n (got s=" +
                          std::to_string(coalition_size) +
                          ", n=" + std::to_string(total_features) + ")");
  }
  // C(n-1, s) by the multiplicative recurrence over the shorter side.
  const std::size_t m = total_features - 1;
  const std::size_t k = std::min(coalition_size, m - coalition_size);
  double binom = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    binom = binom * static_cast<double>(m - k + i) / static_cast<double>(i);
  }
  return 1.0 / (static_cast<double>(total_features) * binom);
}

AttributionResult attribute_exact(PayoffSource& source, const FeatureSet& features,
                                  const AttributionOptions& options) {
  check_exhaustive_limit(features, options);
  const auto start = Clock::now();
  CountingSource counter(source);
  SampledSource sampled(counter, options.samples);

  AttributionResult result;
  result.method = Method::kExact;
  result.sample_count = options.samples;
  guarded([&] { shapley_terms(sampled, features, options, result); },
          [&] { return CallStats{counter.calls(), 0}; });
  result.call_stats = {counter.calls(), 0};
  result.wall_time_seconds = seconds_since(start);
  return result;
}

AttributionResult attribute_cached(PayoffSource& source, const FeatureSet& features,
                                   const AttributionOptions& options) {
  check_exhaustive_limit(features, options);
  const auto start = Clock::now();
  CountingSource counter(source);
  SampledSource sampled(counter, options.samples);
  CachingWrapper cache(sampled);

  AttributionResult result;
  result.method = Method::kCached;
  result.sample_count = options.samples;
  guarded([&] { shapley_terms(cache, features, options, result); },
          [&] { return CallStats{counter.calls(), cache.cache_hits()}; });
  result.call_stats = {counter.calls(), cache.cache_hits()};
  result.wall_time_seconds = seconds_since(start);
  return result;
}

AttributionResult attribute_cached(CachingWrapper& cache, const FeatureSet& features,
                                   const AttributionOptions& options) {
  check_exhaustive_limit(features, options);
  if (options.samples != 1) {
    throw InvalidArgument("a caller-owned cache freezes single draws; average inside its source");
  }
  const auto start = Clock::now();
  const std::size_t calls_before = cache.calls_to_inner();
  const std::size_t hits_before = cache.cache_hits();
  auto stats = [&] {
    return CallStats{cache.calls_to_inner() - calls_before, cache.cache_hits() - hits_before};
  };

  AttributionResult result;
  result.method = Method::kCached;
  guarded([&] { shapley_terms(cache, features, options, result); }, stats);
  result.call_stats = stats();
  result.wall_time_seconds = seconds_since(start);
  return result;
}

AttributionResult attribute_sliding_window(PayoffSource& source, const FeatureSet& features,
                                           std::size_t window_size, bool use_cache,
                                           WindowContext context,
                                           const AttributionOptions& options) {
  const std::size_t n = features.size();
  if (window_size < 1 || window_size > n) {
    throw InvalidArgument("window size must be in [1, " + std::to_string(n) + "], got " +
                          std::to_string(window_size));
  }
  if (window_size > options.exhaustive_limit) {
    throw FeatureLimitExceeded(window_size, options.exhaustive_limit);
  }
  const auto start = Clock::now();
  CountingSource counter(source);
  SampledSource sampled(counter, options.samples);
  std::optional<CachingWrapper> cache;
  if (use_cache) cache.emplace(sampled);
  PayoffSource& eval = cache ? static_cast<PayoffSource&>(*cache) : sampled;
  auto stats = [&] { return CallStats{counter.calls(), cache ? cache->cache_hits() : 0}; };

  AttributionResult result;
  result.method = Method::kSlidingWindow;
  result.window_size = window_size;
  result.window_context = context;
  result.sample_count = options.samples;

  const CoalitionMask full = full_mask(n);
  const std::size_t w = window_size;
  std::vector<double> weights(w);
  for (std::size_t s = 0; s < w; ++s) weights[s] = shapley_weight(s, w);

  std::vector<double> totals(n, 0.0);
  std::vector<std::size_t> counts(n, 0);
  std::vector<CoalitionMask> tasks;
  std::vector<std::size_t> owner;  // window-local feature position per task pair

  guarded(
      [&] {
        for (std::size_t first = 0; first + w <= n; ++first) {
          const CoalitionMask window = full_mask(w) << first;
          const CoalitionMask outside = context == WindowContext::kHeld ? (full & ~window) : 0;
          tasks.clear();
          owner.clear();
          for (std::size_t x = 0; x < w; ++x) {
            for (CoalitionMask local = 0; local < (CoalitionMask{1} << w); ++local) {
              if (local & bit(x)) continue;
              const CoalitionMask subset = (local << first) | outside;
              tasks.push_back(subset | bit(first + x));
              tasks.push_back(subset);
              owner.push_back(x);
            }
          }
          const auto values = evaluate_masks(eval, features, tasks, options.workers);
          observe_endpoints(tasks, values, full, result);

          std::vector<CompensatedSum> local_sums(w);
          for (std::size_t t = 0; t < tasks.size(); t += 2) {
            const std::size_t s = popcount(tasks[t + 1] & window);
            local_sums[owner[t / 2]].add(weights[s] * (values[t] - values[t + 1]));
          }
          for (std::size_t x = 0; x < w; ++x) {
            totals[first + x] += local_sums[x].value();
            counts[first + x] += 1;
          }
        }
      },
      stats);

  for (std::size_t i = 0; i < n; ++i) {
    result.scores[features[i].id] = totals[i] / static_cast<double>(counts[i]);
  }
  result.call_stats = stats();
  result.wall_time_seconds = seconds_since(start);
  return result;
}

AttributionResult attribute_counterfactual(PayoffSource& source, const FeatureSet& features,
                                           const AttributionOptions& options) {
  const std::size_t n = features.size();
  const auto start = Clock::now();
  CountingSource counter(source);
  SampledSource sampled(counter, options.samples);

  AttributionResult result;
  result.method = Method::kCounterfactual;
  result.sample_count = options.samples;

  const CoalitionMask full = full_mask(n);
  std::vector<CoalitionMask> tasks{full};
  for (std::size_t i = 0; i < n; ++i) tasks.push_back(full & ~bit(i));

  guarded(
      [&] {
        const auto values = evaluate_masks(sampled, features, tasks, options.workers);
        observe_endpoints(tasks, values, full, result);
        for (std::size_t i = 0; i < n; ++i) {
          result.scores[features[i].id] = values[0] - values[i + 1];
        }
      },
      [&] { return CallStats{counter.calls(), 0}; });
  result.call_stats = {counter.calls(), 0};
  result.wall_time_seconds = seconds_since(start);
  return result;
}

AttributionResult attribute_oracle(PayoffSource& source, const FeatureSet& features,
                                   const AttributionOptions& options) {
  const std::size_t n = features.size();
  if (n > kOracleFeatureLimit) throw FeatureLimitExceeded(n, kOracleFeatureLimit);
  if (!source.is_deterministic()) {
    throw NonDeterministicSource("the permutation oracle needs a deterministic source, got " +
                                 source.description());
  }
  const auto start = Clock::now();
  CountingSource counter(source);

  AttributionResult result;
  result.method = Method::kOracle;

  const CoalitionMask full = full_mask(n);
  std::vector<CoalitionMask> every(std::size_t{1} << n);
  std::iota(every.begin(), every.end(), CoalitionMask{0});

  guarded(
      [&] {
        const auto value = evaluate_masks(counter, features, every, options.workers);
        result.baseline = value[0];
        result.grand = value[full];

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<CompensatedSum> totals(n);
        double orderings = 0.0;
        do {
          CoalitionMask prefix = 0;
          for (std::size_t pos : order) {
            totals[pos].add(value[prefix | bit(pos)] - value[prefix]);
            prefix |= bit(pos);
          }
          orderings += 1.0;
        } while (std::next_permutation(order.begin(), order.end()));

        for (std::size_t i = 0; i < n; ++i) {
          result.scores[features[i].id] = totals[i].value() / orderings;
        }
      },
      [&] { return CallStats{counter.calls(), 0}; });
  result.call_stats = {counter.calls(), 0};
  result.wall_time_seconds = seconds_since(start);
  return result;
}

}  // namespace shapkit
