#pragma once

#include <stdexcept>
#include <string>

namespace swapreg {

// A design-matrix column with zero norm cannot be normalized.
class ZeroColumnError : public std::runtime_error {
 public:
  explicit ZeroColumnError(int column)
      : std::runtime_error("column " + std::to_string(column) + " has zero norm"),
        column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

// The columns selected by a support are numerically rank deficient.
class RankDeficientError : public std::runtime_error {
 public:
  explicit RankDeficientError(const std::string& what) : std::runtime_error(what) {}
};

class NotPositiveDefiniteError : public std::runtime_error {
 public:
  explicit NotPositiveDefiniteError(const std::string& what) : std::runtime_error(what) {}
};

// An enumeration whose combinatorial count exceeds its guard.
class CombinatorialBlowupError : public std::runtime_error {
 public:
  explicit CombinatorialBlowupError(const std::string& what) : std::runtime_error(what) {}
};

class NonFiniteError : public std::runtime_error {
 public:
  explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

class TooFewSamplesError : public std::runtime_error {
 public:
  explicit TooFewSamplesError(const std::string& what) : std::runtime_error(what) {}
};

class EmptyTrueSupportError : public std::runtime_error {
 public:
  EmptyTrueSupportError() : std::runtime_error("true support is empty") {}
};

class CsvParseError : public std::runtime_error {
 public:
  CsvParseError(const std::string& what, long row, long col)
      : std::runtime_error(what + " (row " + std::to_string(row) + ", col " +
                           std::to_string(col) + ")"),
        row_(row),
        col_(col) {}
  long row() const { return row_; }
  long col() const { return col_; }

 private:
  long row_;
  long col_;
};

class RaggedRowsError : public CsvParseError {
 public:
  RaggedRowsError(long row, long expected, long got)
      : CsvParseError("row has " + std::to_string(got) + " cells, expected " +
                          std::to_string(expected),
                      row, got) {}
};

class NonNumericCellError : public CsvParseError {
 public:
  NonNumericCellError(long row, long col, const std::string& cell)
      : CsvParseError("cell '" + cell + "' is not numeric", row, col) {}
};

class InsufficientClusterSizesError : public std::runtime_error {
 public:
  explicit InsufficientClusterSizesError(const std::string& what)
      : std::runtime_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace swapreg
