#pragma once

#include <stdexcept>
#include <string>

namespace vifuse {

// Failure categories. The CLI maps each category onto a distinct exit code.
enum class ErrorCode {
  kZeroVector,
  kTopologyMismatch,
  kDegenerateBone,
  kUnboundJoint,
  kUnknownSensor,
  kBehindCamera,
  kInvalidFragmentLength,
  kScheduleMismatch,
  kLengthMismatch,
  kTooShort,
  kInvalidConfig,
  kMissingInput,
  kParse,
  kVersionMismatch,
  kIo,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code),
        message_(what) {}

  ErrorCode code() const { return code_; }
  // The description without the category prefix.
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kTopologyMismatch: return "TopologyMismatch";
    case ErrorCode::kDegenerateBone: return "DegenerateBone";
    case ErrorCode::kUnboundJoint: return "UnboundJoint";
    case ErrorCode::kUnknownSensor: return "UnknownSensor";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kInvalidFragmentLength: return "InvalidN";
    case ErrorCode::kScheduleMismatch: return "ScheduleMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kMissingInput: return "MissingInput";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

}  // namespace vifuse
