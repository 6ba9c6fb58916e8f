#pragma once

#include <stdexcept>
#include <string>

namespace shapkit {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Raised when an exhaustive computation is requested for too many features.
class FeatureLimitExceeded : public Error {
 public:
  FeatureLimitExceeded(std::size_t requested, std::size_t limit)
      : Error("feature count " + std::to_string(requested) +
              " exceeds the exhaustive limit of " + std::to_string(limit)),
        requested_(requested),
        limit_(limit) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t requested_;
  std::size_t limit_;
};

/// An operation needs bit-reproducible payoffs but got a stochastic source.
class NonDeterministicSource : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

/// Network or HTTP failure after retries were exhausted.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status = 0)
      : Error(what), status_(status) {}

  /// HTTP status, or 0 when no response was received.
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Replay mode was asked for a record that the transcript does not hold.
class ReplayMiss : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class FixtureError : public Error {
 public:
  using Error::Error;
};

}  // namespace shapkit
