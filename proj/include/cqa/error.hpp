#pragma once

#include <stdexcept>
#include <string>

namespace cqa {

// Bad or inconsistent input data (malformed dumps, missing artifacts).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a precondition (bad argument, impossible config).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cqa
