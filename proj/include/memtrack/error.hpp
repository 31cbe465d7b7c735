#pragma once

#include <stdexcept>
#include <string>

namespace memtrack {

enum class ErrorCode {
    DuplicateSlot,
    ScoreOutOfRange,
    NonUnitEmbedding,
    EmptyGroup,
    LengthMismatch,
    DimensionMismatch,
    EmptyBank,
    NonMonotonicFrameIndex,
    InvalidWindow,
    UnknownArchetype,
    FrameRangeMismatch,
    MissingPolicy,
    InstanceTooLarge,
    ParseError,
    UnknownKey,
    RangeViolation,
    IoError,
    SchemaVersionMismatch,
    CorruptLine,
};

const char* error_code_name(ErrorCode code);

/// Single exception type for the whole library; the code identifies the
/// contract that was violated, the message names the offending slot/field.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateSlot: return "DuplicateSlot";
        case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
        case ErrorCode::NonUnitEmbedding: return "NonUnitEmbedding";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyBank: return "EmptyBank";
        case ErrorCode::NonMonotonicFrameIndex: return "NonMonotonicFrameIndex";
        case ErrorCode::InvalidWindow: return "InvalidWindow";
        case ErrorCode::UnknownArchetype: return "UnknownArchetype";
        case ErrorCode::FrameRangeMismatch: return "FrameRangeMismatch";
        case ErrorCode::MissingPolicy: return "MissingPolicy";
        case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::RangeViolation: return "RangeViolation";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
        case ErrorCode::CorruptLine: return "CorruptLine";
    }
    return "UnknownError";
}

}  // namespace memtrack
