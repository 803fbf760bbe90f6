#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "dsproj/types.hpp"

namespace dsproj {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatches, out-of-range indices.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A contract on configured objects failed. `key` names what was rejected
/// (a config key or the violated condition).
class ValidationError : public Error {
 public:
  ValidationError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Vec last_iterate, double residual)
      : Error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}
  const Vec& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }

 private:
  Vec last_iterate_;
  double residual_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A non-finite coordinate appeared during an iteration.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::int64_t k, int node) : Error(what), k_(k), node_(node) {}
  std::int64_t iteration() const { return k_; }
  int node() const { return node_; }

 private:
  std::int64_t k_;
  int node_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsproj
