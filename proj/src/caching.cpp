#include "shapkit/caching.hpp"

namespace shapkit {

double CachingWrapper::evaluate(const Coalition& coalition) {
  std::promise<double> promise;
  {
    std::unique_lock lock(mutex_);
    auto it = cache_.find(coalition.key());
    if (it != cache_.end()) {
      auto pending = it->second;
      lock.unlock();
      cache_hits_.fetch_add(1);
      return pending.get();
    }
    cache_.emplace(coalition.key(), promise.get_future().share());
    calls_to_inner_.fetch_add(1);
  }

  try {
    const double value = inner_.evaluate(coalition);
    promise.set_value(value);
    return value;
  } catch (...) {
    {
      std::lock_guard lock(mutex_);
      cache_.erase(coalition.key());
    }
    promise.set_exception(std::current_exception());
    throw;
  }
}

std::optional<double> CachingWrapper::lookup(const Coalition& coalition) const {
  std::shared_future<double> pending;
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(coalition.key());
    if (it == cache_.end()) return std::nullopt;
    pending = it->second;
  }
  if (pending.wait_for(std::chrono::seconds(0)) != std::future_status::ready) return std::nullopt;
  try {
    return pending.get();
  } catch (...) {
    // failed call not yet erased by its owner
    return std::nullopt;
  }
}

std::size_t CachingWrapper::size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::string CachingWrapper::description() const {
  return "cached(" + inner_.description() + ")";
}

}  // namespace shapkit
