#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or malformed input (usage-level failure).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

class MeshError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Numerical failures. The CLI maps these to exit code 2.
class NumericalError : public Error {
public:
  using Error::Error;
};

class NearSingularLocalSystem : public NumericalError {
public:
  NearSingularLocalSystem(const std::string& what, std::size_t vertex)
      : NumericalError(what), vertex_(vertex) {}
  std::size_t vertex() const noexcept { return vertex_; }

private:
  std::size_t vertex_;
};

class SingularSystem : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class ResidualTooLarge : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class InfSupFailure : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class BlowUp : public NumericalError {
public:
  using NumericalError::NumericalError;
};

}  // namespace ncr
