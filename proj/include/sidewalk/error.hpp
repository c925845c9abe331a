#pragma once

#include <stdexcept>
#include <string>

namespace sidewalk {

// Base for every error raised by the engine. Callers that only need a
// diagnostic can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

class ExtentError : public Error {
 public:
  using Error::Error;
};

// Input could not be parsed (bad JSON, malformed raster header, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Input parsed but violates the expected schema (wrong geometry kind, ...).
class SchemaError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class NodataError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sidewalk
