#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radarsplat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument or file contents violate a documented precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A coordinate falls outside the angular domain of a partition.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double azimuth, double elevation,
              std::size_t index = npos)
      : Error(what), azimuth_(azimuth), elevation_(elevation), index_(index) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  double azimuth() const { return azimuth_; }
  double elevation() const { return elevation_; }
  /// Position of the offending element in a batch, or npos.
  std::size_t index() const { return index_; }

 private:
  double azimuth_;
  double elevation_;
  std::size_t index_;
};

/// Covariance matrix could not be factorized even after jitter escalation.
class DegenerateData : public Error {
 public:
  DegenerateData(const std::string& what, double jitter)
      : Error(what), jitter_(jitter) {}
  double jitter() const { return jitter_; }

 private:
  double jitter_;
};

/// Malformed text or binary input. `location` is a 1-based line number for
/// line-oriented formats and a byte offset for PLY.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t location)
      : Error(what), location_(location) {}
  std::size_t location() const { return location_; }

 private:
  std::size_t location_;
};

}  // namespace radarsplat
