#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taut {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::string expected, const std::string& detail);

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

/// A variable reference that is neither a coordinate nor a declared parameter.
class BindError : public Error {
 public:
  using Error::Error;
};

/// ln of a non-positive value, sqrt of a negative value, division by zero, ...
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested symbolic operation is outside what the expression language supports.
class UnsupportedDerivative : public Error {
 public:
  using Error::Error;
};

/// Model/field document does not follow the file schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A model, field or matrix is well-formed but fails a structural check.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class SingularFrame : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NonBasicField : public ValidationError {
 public:
  NonBasicField(const std::string& what, double residual)
      : ValidationError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace taut
