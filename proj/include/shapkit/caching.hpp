#pragma once

#include <atomic>
#include <future>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "shapkit/payoff.hpp"

namespace shapkit {

/// Memoizing inference wrapper keyed by the order-invariant coalition key.
///
/// The first payoff drawn for a key is frozen, so the wrapper is deterministic
/// even over a stochastic inner source. Concurrent misses on the same key are
/// collapsed into one inner call. A failed inner call is not cached; waiters on
/// that call see the same error and the next request retries.
///
/// `inner` must outlive the wrapper.
class CachingWrapper final : public PayoffSource {
 public:
  explicit CachingWrapper(PayoffSource& inner) : inner_(inner) {}

  CachingWrapper(const CachingWrapper&) = delete;
  CachingWrapper& operator=(const CachingWrapper&) = delete;

  double evaluate(const Coalition& coalition) override;
  bool is_deterministic() const override { return true; }
  std::string description() const override;

  /// Stored payoff for a completed evaluation, if any.
  std::optional<double> lookup(const Coalition& coalition) const;

  std::size_t calls_to_inner() const noexcept { return calls_to_inner_.load(); }
  std::size_t cache_hits() const noexcept { return cache_hits_.load(); }
  std::size_t size() const;

 private:
  PayoffSource& inner_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_future<double>> cache_;
  std::atomic<std::size_t> calls_to_inner_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

}  // namespace shapkit
