#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include "shapkit/coalition.hpp"

namespace shapkit {

/// Value function of the attribution game: maps a coalition to a payoff.
///
/// Implementations must accept the empty coalition and must be safe to call
/// from several threads at once. A deterministic source returns bit-identical
/// payoffs for coalitions with the same canonical key.
class PayoffSource {
 public:
  virtual ~PayoffSource() = default;

  virtual double evaluate(const Coalition& coalition) = 0;
  virtual bool is_deterministic() const = 0;
  virtual std::string description() const = 0;
};

/// Deterministic game given by an explicit payoff table.
class TableGame final : public PayoffSource {
 public:
  TableGame() = default;
  TableGame(std::map<std::string, double> entries, double default_payoff);

  void set(const Coalition& coalition, double payoff);

  double evaluate(const Coalition& coalition) override;
  bool is_deterministic() const override { return true; }
  std::string description() const override;

  const std::map<std::string, double>& entries() const noexcept { return entries_; }
  double default_payoff() const noexcept { return default_payoff_; }

 private:
  std::map<std::string, double> entries_;
  double default_payoff_ = 0.0;
};

/// Adapts a callable into a payoff source. Mostly useful for analytic games.
class FunctionGame final : public PayoffSource {
 public:
  using Function = std::function<double(const Coalition&)>;

  FunctionGame(Function fn, bool deterministic, std::string description);

  double evaluate(const Coalition& coalition) override { return fn_(coalition); }
  bool is_deterministic() const override { return deterministic_; }
  std::string description() const override { return description_; }

 private:
  Function fn_;
  bool deterministic_;
  std::string description_;
};

/// A base game plus zero-mean Gaussian noise, redrawn on every call.
///
/// Draw k uses a generator seeded from (seed, k), so the payoff sequence is
/// reproducible for a fixed seed and a fixed evaluation order.
class NoisyGame final : public PayoffSource {
 public:
  NoisyGame(std::shared_ptr<PayoffSource> base, double noise_std, std::uint64_t seed);

  double evaluate(const Coalition& coalition) override;
  bool is_deterministic() const override { return false; }
  std::string description() const override;

  double noise_std() const noexcept { return noise_std_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return draw_counter_.load(); }

 private:
  std::shared_ptr<PayoffSource> base_;
  double noise_std_;
  std::uint64_t seed_;
  std::atomic<std::uint64_t> draw_counter_{0};
};

/// Arithmetic mean of `n_samples` independent evaluations of `source` at `coalition`.
double sample_mean_payoff(PayoffSource& source, const Coalition& coalition,
                          std::size_t n_samples);

}  // namespace shapkit
