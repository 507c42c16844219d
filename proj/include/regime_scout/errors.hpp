#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace regime_scout {

// Base type for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Integration produced a NaN/inf or the state left the blow-up guard box.
struct NonFiniteError : Error {
  NonFiniteError(std::size_t step_, const std::string& msg) : Error(msg), step(step_) {}
  std::size_t step;
};

// Not enough post-transient samples to build a spectrum.
struct TooShortError : Error {
  using Error::Error;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

// Covariance factorization failed even at the largest jitter level.
struct NotPositiveDefiniteError : Error {
  using Error::Error;
};

// Frequency-response evaluation asked for an amplitude the forcing cannot sustain.
struct NegativeDiscriminantError : Error {
  using Error::Error;
};

// Every acquisition candidate was already sampled.
struct EmptyPoolError : Error {
  using Error::Error;
};

// Clustering produced no clusters at all, so no surrogate can be trained.
struct DegenerateClusteringError : Error {
  using Error::Error;
};

// Invalid configuration; `path` names the offending key ("system.free_axes[0]", ...).
struct ConfigError : Error {
  ConfigError(std::string path_, const std::string& msg)
      : Error(path_.empty() ? msg : path_ + ": " + msg), path(std::move(path_)) {}
  std::string path;
};

}  // namespace regime_scout
