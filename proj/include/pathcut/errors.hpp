#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pathcut {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (edge lists, instance files, CSV).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Weight file does not match the declared architecture.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

// No admissible cut exists. Carries the node sequence of the path that could
// not be blocked (empty when the cause is not tied to a single path).
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::vector<int> path = {})
      : Error(what), path_(std::move(path)) {}
  const std::vector<int>& path() const { return path_; }

 private:
  std::vector<int> path_;
};

}  // namespace pathcut
