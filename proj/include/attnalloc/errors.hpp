#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace attnalloc {

/// Base for every error this library raises. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// The requested object has no occurrence in the image subset.
class AbsentObjectError : public Error {
public:
  AbsentObjectError(int object_id)
      : Error("object " + std::to_string(object_id) + " does not appear in the image subset"),
        object_id_(object_id) {}
  int object_id() const noexcept { return object_id_; }

private:
  int object_id_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class FitError : public Error {
public:
  using Error::Error;
};

class EvaluationError : public Error {
public:
  using Error::Error;
};

/// Raised when a log term would be non-positive (capacity <= 1 K) or a link parameter is out of range.
class DomainError : public Error {
public:
  using Error::Error;
};

class InfeasibleError : public Error {
public:
  InfeasibleError(double deficit)
      : Error("infeasible allocation: budget is short of n * floor by " + std::to_string(deficit) + " K"),
        deficit_(deficit) {}
  double deficit() const noexcept { return deficit_; }

private:
  double deficit_;
};

class SearchSpaceError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace attnalloc
