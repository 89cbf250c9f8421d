#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bitref {

// Exit codes shared by the error taxonomy and the CLI.
enum class ExitCode : int {
    ok = 0,
    failure = 1,
    parse = 2,
    not_found = 3,
    verification = 4,
    capacity = 5,
    io = 6,
};

class Error : public std::runtime_error {
  public:
    Error(ExitCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    ExitCode code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(code_); }

  private:
    ExitCode code_;
};

// Malformed on-disk input. byte_offset points at the offending byte when known.
class ParseError : public Error {
  public:
    explicit ParseError(const std::string& msg) : Error(ExitCode::parse, msg) {}
    ParseError(const std::string& msg, std::uint64_t offset)
        : Error(ExitCode::parse, msg + " (at byte " + std::to_string(offset) + ")"),
          byte_offset(offset) {}

    std::uint64_t byte_offset = UINT64_MAX;
};

class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string& msg) : Error(ExitCode::parse, msg) {}
};

class RangeError : public Error {
  public:
    explicit RangeError(const std::string& msg) : Error(ExitCode::parse, msg) {}
};

class NotFoundError : public Error {
  public:
    explicit NotFoundError(const std::string& msg) : Error(ExitCode::not_found, msg) {}
};

class VerificationError : public Error {
  public:
    explicit VerificationError(const std::string& msg) : Error(ExitCode::verification, msg) {}
};

// Index bound to a different corpus image than the one supplied.
class WrongCorpusError : public VerificationError {
  public:
    using VerificationError::VerificationError;
};

// Decoded bits disagree with the recorded payload digest.
class CorruptionError : public VerificationError {
  public:
    using VerificationError::VerificationError;
};

// Registered image changed on disk since registration.
class TamperError : public VerificationError {
  public:
    using VerificationError::VerificationError;
};

class CapacityError : public Error {
  public:
    explicit CapacityError(const std::string& msg) : Error(ExitCode::capacity, msg) {}
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& msg) : Error(ExitCode::io, msg) {}
};

}  // namespace bitref
