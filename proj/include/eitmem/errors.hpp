#pragma once

#include <stdexcept>
#include <string>

namespace eitmem {

enum class ErrorKind {
  DegenerateDenominator,
  RegimeViolation,
  OutOfCell,
  GridMismatch,
  WraparoundDetected,
  OverflowGuard,
  DegenerateNorm,
  WindowTooShort,
  ParseError,
  ValidationError,
};

const char* to_string(ErrorKind kind);

/// Base for every error raised by the library. The kind lets callers (the CLI
/// in particular) map failures to exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Physics guards abort a simulation; everything else is bad input or misuse.
  bool is_physics_guard() const noexcept {
    return kind_ == ErrorKind::WraparoundDetected || kind_ == ErrorKind::OverflowGuard;
  }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(ErrorKind::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::ValidationError, what) {}
};

}  // namespace eitmem
