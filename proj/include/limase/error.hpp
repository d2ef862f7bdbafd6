#pragma once

#include <stdexcept>
#include <string>

namespace limase {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed something that violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Input data could not be parsed or is not usable (CSV, JSON model files).
class DataError : public Error {
 public:
  using Error::Error;
};

// A black-box model failed to produce predictions.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace limase
