#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wavelab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a time step drives the solution past the max-norm guard.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class RootBracketError : public Error {
 public:
  using Error::Error;
};

/// A single path of an ensemble failed; carries the seed for reproduction.
class PathError : public Error {
 public:
  PathError(const std::string& what, std::uint64_t seed, double time)
      : Error(what), seed_(seed), time_(time) {}
  std::uint64_t seed() const noexcept { return seed_; }
  double time() const noexcept { return time_; }

 private:
  std::uint64_t seed_;
  double time_;
};

/// Malformed config text; line is 1-based (0 when not tied to a line).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace wavelab
