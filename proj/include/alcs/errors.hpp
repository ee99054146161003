// Error types shared across the library. Every throwing function documents
// which of these it can raise; callers that need to distinguish catch the
// concrete type, everything else can catch std::exception.
#pragma once

#include <stdexcept>
#include <string>

namespace alcs {

// Bad argument: dimension mismatch, invalid configuration, malformed value.
class input_error : public std::invalid_argument {
 public:
  explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical failure (e.g. Cholesky on a non-positive-definite matrix).
// Carries the index of the failing pivot when one is known.
class numerical_error : public std::runtime_error {
 public:
  numerical_error(const std::string& what, int pivot_index)
      : std::runtime_error(what), pivot(pivot_index) {}
  int pivot = -1;
};

// Lookup of a key that is not present (e.g. unknown case id).
class lookup_error : public std::out_of_range {
 public:
  explicit lookup_error(const std::string& what) : std::out_of_range(what) {}
};

// Operation invalid in the current state (e.g. querying from an empty pool).
class state_error : public std::logic_error {
 public:
  explicit state_error(const std::string& what) : std::logic_error(what) {}
};

// Argument outside the mathematical domain of the function.
class domain_error : public std::domain_error {
 public:
  explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// Malformed input file; carries the location for diagnostics.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& file, long line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        path(file),
        line_number(line) {}
  std::string path;
  long line_number = 0;
};

}  // namespace alcs
