#pragma once

#include <stdexcept>
#include <string>

namespace keygraph {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data: unreadable paths, malformed files, unusable corpora.
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid caller-supplied parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// sigma-index needs a word to occur at least twice.
class InsufficientOccurrences : public Error {
 public:
  explicit InsufficientOccurrences(const std::string& word)
      : Error("word '" + word + "' occurs fewer than two times") {}
};

class NoMinoritySamples : public Error {
 public:
  NoMinoritySamples() : Error("training set has no positive records") {}
};

// A classifier was asked to learn from a single-class sample.
class DegenerateTrainingSet : public Error {
 public:
  using Error::Error;
};

class ModelFormatError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace keygraph
