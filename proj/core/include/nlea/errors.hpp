#ifndef NLEA_ERRORS_HPP
#define NLEA_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nlea {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched variable counts, vector lengths, or matrix shapes.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

/// A required structural precondition does not hold (e.g. nonzero constant
/// term where a vanishing one is required).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(what) {}
};

/// Expression or problem-file syntax error. `offset` is a byte offset into
/// the source text, `excerpt` the line it points into.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& expected,
             const std::string& excerpt)
      : Error("parse error at offset " + std::to_string(offset) + ": expected " +
              expected + " near \"" + excerpt + "\""),
        offset(offset),
        expected(expected),
        excerpt(excerpt) {}

  std::size_t offset;
  std::string expected;
  std::string excerpt;
};

/// A matrix that must have full column rank does not.
class RankDeficientError : public Error {
 public:
  explicit RankDeficientError(const std::string& what) : Error(what) {}
};

/// A homogeneous-degree solve hit a singular operator with an inconsistent
/// right-hand side; carries the degree and the smallest singular value seen.
class ResonanceError : public Error {
 public:
  ResonanceError(int degree, double margin)
      : Error("resonant operator at degree " + std::to_string(degree) +
              " (smallest singular value " + std::to_string(margin) + ")"),
        degree(degree),
        margin(margin) {}

  int degree;
  double margin;
};

}  // namespace nlea

#endif  // NLEA_ERRORS_HPP
