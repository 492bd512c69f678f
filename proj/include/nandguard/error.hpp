#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nandguard {

enum class ErrorCode {
  OutOfRange,
  BadBlock,
  NotErased,
  DownwardProgram,
  LengthMismatch,
  NonAsciiCharacter,
  DecodeFailure,
  DeviceFull,
  Unmapped,
  NothingToCollect,
  ParameterError,
  ConfigError,
  ExhaustedRounds,
  CorruptImage,
  VersionMismatch,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every domain failure in the library is reported through this type. The
// code is stable and is what tests and the CLI dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nandguard
