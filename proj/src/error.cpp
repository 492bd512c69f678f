#include "nandguard/error.hpp"

namespace nandguard {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BadBlock: return "BadBlock";
    case ErrorCode::NotErased: return "NotErased";
    case ErrorCode::DownwardProgram: return "DownwardProgram";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonAsciiCharacter: return "NonAsciiCharacter";
    case ErrorCode::DecodeFailure: return "DecodeFailure";
    case ErrorCode::DeviceFull: return "DeviceFull";
    case ErrorCode::Unmapped: return "Unmapped";
    case ErrorCode::NothingToCollect: return "NothingToCollect";
    case ErrorCode::ParameterError: return "ParameterError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ExhaustedRounds: return "ExhaustedRounds";
    case ErrorCode::CorruptImage: return "CorruptImage";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace nandguard
