#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blq {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter lies outside the domain where the requested quantity is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A linear map that should be surjective has deficient rank.
class NotSurjectiveError : public Error {
 public:
  NotSurjectiveError(std::size_t index, std::size_t rank, std::size_t rows)
      : Error("map " + std::to_string(index) + " is not surjective (rank " +
              std::to_string(rank) + " < " + std::to_string(rows) + ")"),
        index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

// Mass of a pushforward landed outside the target grid.
class CoverageError : public Error {
 public:
  explicit CoverageError(double escaping_fraction)
      : Error("pushforward image escapes the target box (escaping mass fraction " +
              std::to_string(escaping_fraction) + ")"),
        escaping_fraction_(escaping_fraction) {}
  double escaping_fraction() const { return escaping_fraction_; }

 private:
  double escaping_fraction_;
};

class CapExceededError : public Error {
 public:
  using Error::Error;
};

// Quadrature self-estimate too large relative to the computed value.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace blq
