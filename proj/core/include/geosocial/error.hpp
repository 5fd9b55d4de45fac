#pragma once

#include <stdexcept>
#include <string>

namespace geosocial {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameter value or parameter combination (alpha outside [0,1], k > N, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Sizes of two inputs disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An index lies outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// A quantity is mathematically undefined for the given input
// (z-Rand with zero null variance, sigma without co-stop pairs, ...).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

// A row of the affinity matrix sums to zero.
class DegenerateDegreeError : public Error {
 public:
  using Error::Error;
};

// Not enough zeros are available to absorb the requested false positives.
class InfeasibleNoiseError : public Error {
 public:
  using Error::Error;
};

// Rank-one eigenvector formula hit a pole.
class IllConditionedError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the 1-based line number when known (0 otherwise).
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace geosocial
