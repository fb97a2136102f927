#pragma once

#include <stdexcept>
#include <string>

namespace isogap {

// Error taxonomy used to pick CLI exit codes: configuration misuse,
// violated model assumptions detected before heavy work, and numerical
// failures detected during it.
enum class ErrorKind { usage, preflight, numerical };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }

private:
  ErrorKind kind_;
  std::string code_;
};

class UsageError : public Error {
public:
  UsageError(std::string code, const std::string& message)
      : Error(ErrorKind::usage, std::move(code), message) {}
};

class PreflightError : public Error {
public:
  PreflightError(std::string code, const std::string& message)
      : Error(ErrorKind::preflight, std::move(code), message) {}
};

class NumericalError : public Error {
public:
  NumericalError(std::string code, const std::string& message)
      : Error(ErrorKind::numerical, std::move(code), message) {}
};

}  // namespace isogap
