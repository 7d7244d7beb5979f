#pragma once

#include <stdexcept>
#include <string>

namespace dclass {

/// Raised for malformed or invalid input data (bad JSON, schema violations,
/// broken invariants). The CLI maps it to exit status 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid parameters or misuse of the API.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace dclass
