#pragma once

#include <stdexcept>
#include <string>

namespace cltlab {

// Base of every error thrown by the library. The CLI maps any of these to
// exit code 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A model value failed validation; the message names the violated invariant.
class InvalidSpec : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class RangeError : public Error {
public:
  using Error::Error;
};

class SingularCovariance : public Error {
public:
  using Error::Error;
};

class EmptyBatch : public Error {
public:
  using Error::Error;
};

class DimensionTooHigh : public Error {
public:
  using Error::Error;
};

class TooFewSamples : public Error {
public:
  using Error::Error;
};

class GridTooCoarse : public Error {
public:
  using Error::Error;
};

class FormatError : public Error {
public:
  using Error::Error;
};

} // namespace cltlab
