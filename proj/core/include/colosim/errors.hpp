#pragma once

#include <stdexcept>
#include <string>

namespace colosim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or parameter values. Surfaces as exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An allocation would overflow a node. Filtering must prevent this, so
// seeing one means the scheduler is broken.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ExportError : public Error {
 public:
  using Error::Error;
};

// Audit walk found the cluster in an impossible state.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace colosim
