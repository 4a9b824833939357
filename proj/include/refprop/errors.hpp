#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace refprop {

/// Malformed input file. Lines are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// Semantically invalid data: bad corpus/model/rule combinations, missing
/// labels, unknown ids.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside model fitting.
class TrainError : public std::runtime_error {
 public:
  TrainError(std::size_t iteration, const std::string& message)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " +
                           message),
        iteration_(iteration) {}

  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace refprop
