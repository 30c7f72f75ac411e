#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace analytica {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// A function was evaluated at (or restricted through) one of its poles.
// `where` is a human-readable rendering of the offending point.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, std::string where)
      : Error(what + (where.empty() ? "" : " at " + where)),
        where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Degenerate or inconsistent geometric input (rank deficiency, degenerate
// sphere, plane through the origin where one is forbidden, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Reconstruction failures: incompatible restriction data, failed exact
// division, rank-deficient sampling, non-polynomial cone data.
class InterpolationError : public Error {
 public:
  using Error::Error;
};

// A restriction turned out not to be analytic where it was required to be.
class NotAnalyticError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace analytica
