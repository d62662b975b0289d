#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace psiest {

enum class Errc {
  kDomainError,
  kInvalidArgument,
  kInvalidParameter,
  kMissingClosedForm,
  kSolverFailure,
  kOutOfRange,
  kSignViolation,
  kDegenerateDerivative,
  kDegenerateProbes,
  kEmptyLowerSet,
  kSyntaxError,
  kUnknownIdentifier,
  kParseError,
  kEmptyData,
  kNegativeWeight,
};

std::string_view errc_name(Errc code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Raised by the expression parser; offset is a byte offset into the source.
class SyntaxError : public Error {
 public:
  SyntaxError(Errc code, std::size_t offset, std::string expected)
      : Error(code, "at offset " + std::to_string(offset) + ": expected " +
                        expected),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

// Raised by the data reader; line is 1-based.
class ParseError : public Error {
 public:
  ParseError(Errc code, std::size_t line, const std::string& message)
      : Error(code, "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace psiest
