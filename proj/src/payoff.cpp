#include "shapkit/payoff.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "shapkit/error.hpp"

namespace shapkit {

namespace {

// splitmix64 finalizer; decorrelates (seed, counter) pairs.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

TableGame::TableGame(std::map<std::string, double> entries, double default_payoff)
    : default_payoff_(default_payoff) {
  for (auto& [key, value] : entries) set(Coalition::parse_key(key), value);
}

void TableGame::set(const Coalition& coalition, double payoff) {
  if (!std::isfinite(payoff)) {
    throw InvalidArgument("table payoff for '" + coalition.key() + "' is not finite");
  }
  entries_[coalition.key()] = payoff;
}

double TableGame::evaluate(const Coalition& coalition) {
  auto it = entries_.find(coalition.key());
  return it == entries_.end() ? default_payoff_ : it->second;
}

std::string TableGame::description() const {
  std::ostringstream out;
  out << "table game (" << entries_.size() << " entries, default " << default_payoff_ << ")";
  return out.str();
}

FunctionGame::FunctionGame(Function fn, bool deterministic, std::string description)
    : fn_(std::move(fn)), deterministic_(deterministic), description_(std::move(description)) {}

NoisyGame::NoisyGame(std::shared_ptr<PayoffSource> base, double noise_std, std::uint64_t seed)
    : base_(std::move(base)), noise_std_(noise_std), seed_(seed) {
  if (!base_) throw InvalidArgument("noisy game needs a base game");
  if (!(noise_std_ >= 0.0) || !std::isfinite(noise_std_)) {
    throw InvalidArgument("noise_std must be finite and non-negative");
  }
}

double NoisyGame::evaluate(const Coalition& coalition) {
  const std::uint64_t draw = draw_counter_.fetch_add(1);
  const double value = base_->evaluate(coalition);
  if (noise_std_ == 0.0) return value;
  std::mt19937_64 engine(mix(seed_ ^ mix(draw)));
  std::normal_distribution<double> noise(0.0, noise_std_);
  return value + noise(engine);
}

std::string NoisyGame::description() const {
  std::ostringstream out;
  out << "noisy(" << base_->description() << ", std " << noise_std_ << ", seed " << seed_ << ")";
  return out.str();
}

double sample_mean_payoff(PayoffSource& source, const Coalition& coalition,
                          std::size_t n_samples) {
  if (n_samples == 0) throw InvalidArgument("n_samples must be at least 1");
  if (n_samples == 1) return source.evaluate(coalition);
  double total = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) total += source.evaluate(coalition);
  return total / static_cast<double>(n_samples);
}

}  // namespace shapkit
