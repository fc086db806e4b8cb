#pragma once

#include <stdexcept>
#include <string>

namespace medeq {

// Invalid input data: schema violations, malformed files, inconsistent
// arguments. The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PoolExhausted : public DataError {
 public:
  using DataError::DataError;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace medeq
