#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace psdbscan {

using PointId = std::uint32_t;
using Label = std::uint32_t;

/// Label of a point that is neither core nor within eps of a core point.
/// Lies outside [0, N) for every admissible N.
inline constexpr Label kNoise = std::numeric_limits<Label>::max();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid data or arguments handed to an operation.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Violation of the worker/server exchange protocol (missing push, barrier
/// timeout, inconsistent noise labels, label-chain cycles).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace psdbscan
