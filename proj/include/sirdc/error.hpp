#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sirdc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data is malformed, misaligned or internally inconsistent.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Parse failure with 1-based row/column coordinates into the source file.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : DataError(what + " (row " + std::to_string(row) + ", column " +
                  std::to_string(column) + ")"),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// The requested quantities cannot be realized by the model (e.g. a
/// susceptible count that would go non-positive). `day` is 1-based, 0 when
/// not tied to a day.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, int day = 0)
      : Error(day > 0 ? what + " (day " + std::to_string(day) + ")" : what), day_(day) {}
  int day() const noexcept { return day_; }

 private:
  int day_;
};

/// A region has no usable day one (never reaches the case threshold).
class NotFittableError : public Error {
 public:
  using Error::Error;
};

/// Iterative numerics failed to converge or a factorization broke down.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, int day = 0)
      : Error(day > 0 ? what + " (day " + std::to_string(day) + ")" : what), day_(day) {}
  int day() const noexcept { return day_; }

 private:
  int day_;
};

}  // namespace sirdc
