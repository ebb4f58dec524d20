#pragma once

#include <stdexcept>
#include <string>

namespace cyber {

// Base class for every error raised by the pipeline.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Input data violates a documented precondition (bad labels, empty corpus...).
class DataError : public Error {
 public:
  using Error::Error;
};

class EmptyCorpusError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class LengthError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace cyber
