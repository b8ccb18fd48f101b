#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hroa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (prefixes, CSV rows, level lists).
class ParseError : public Error {
public:
  explicit ParseError(const std::string &what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A value violates a documented range or structural constraint.
class RangeError : public Error {
public:
  using Error::Error;
};

/// Wire framing or field-range violation. Carries the byte offset when known.
class WireError : public Error {
public:
  explicit WireError(const std::string &what, std::size_t offset = 0)
      : Error(what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

/// Peer violated the reset-query PDU ordering.
class ProtocolError : public Error {
public:
  using Error::Error;
};

/// Socket level failure (connect, bind, read, write).
class TransportError : public Error {
public:
  using Error::Error;
};

/// The cache answered with an Error Report PDU.
class ErrorReportReceived : public ProtocolError {
public:
  ErrorReportReceived(std::uint16_t code, const std::string &text)
      : ProtocolError("error report " + std::to_string(code) + ": " + text), code_(code) {}

  std::uint16_t code() const noexcept { return code_; }

private:
  std::uint16_t code_;
};

} // namespace hroa
