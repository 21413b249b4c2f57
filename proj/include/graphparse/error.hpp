#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace graphparse {

// Base class for every failure raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model document. `location` is a byte offset for syntax errors or
// a JSON pointer for structural ones.
class ModelLoadError : public Error {
 public:
  ModelLoadError(const std::string& location, const std::string& message)
      : Error(location + ": " + message), location_(location) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

class CompileError : public Error {
 public:
  using Error::Error;
};

class LexiconError : public Error {
 public:
  // Line 0 means the problem is not tied to a document line.
  LexiconError(std::size_t line, const std::string& message)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ScanError : public Error {
 public:
  ScanError(std::size_t offset, const std::string& message)
      : Error(message), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Raised when the chart holds no complete analysis. `offset` is the furthest
// character offset reached and `expected` the lexical elements predicted there.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected,
             const std::string& message)
      : Error(message), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class AlgebraError : public Error {
 public:
  using Error::Error;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class BundleError : public Error {
 public:
  using Error::Error;
};

}  // namespace graphparse
