#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tailgate {

// Base of everything this library throws on a violated precondition or a
// failed computation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sample whose magnitude is zero reached the log terms of the estimator.
class ZeroNormError : public Error {
 public:
  ZeroNormError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// The estimated 1/alpha was not positive.
class NonPositiveEstimateError : public Error {
 public:
  NonPositiveEstimateError(const std::string& what, double inv_alpha)
      : Error(what), inv_alpha_(inv_alpha) {}
  double inv_alpha() const noexcept { return inv_alpha_; }

 private:
  double inv_alpha_;
};

// A training iterate became non-finite. iteration() is the 1-based step.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

// One or more runs of an ensemble failed; the whole ensemble is rejected.
class EnsembleError : public Error {
 public:
  EnsembleError(const std::string& what, std::vector<std::size_t> failed_runs)
      : Error(what), failed_runs_(std::move(failed_runs)) {}
  const std::vector<std::size_t>& failed_runs() const noexcept {
    return failed_runs_;
  }

 private:
  std::vector<std::size_t> failed_runs_;
};

// Bad configuration. key() is the offending key path ("k1", "batch[2]", ...).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : Error(key + ": " + message), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace tailgate
