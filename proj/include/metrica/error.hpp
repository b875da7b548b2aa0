#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metrica {

enum class ErrorCode {
    EmptyAfterNormalization,
    NoVowel,
    EmptyLine,
    Unfittable,
    LengthMismatch,
    InvalidPattern,
    MalformedXml,
    MissingMet,
    UnnormalizableMet,
    InsufficientData,
    InvalidArgument,
    EmptyInput,
    AlignmentError,
    EmptyTrainingSet,
    CorruptModelFile,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::EmptyAfterNormalization: return "EmptyAfterNormalization";
    case ErrorCode::NoVowel: return "NoVowel";
    case ErrorCode::EmptyLine: return "EmptyLine";
    case ErrorCode::Unfittable: return "Unfittable";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidPattern: return "InvalidPattern";
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::MissingMet: return "MissingMet";
    case ErrorCode::UnnormalizableMet: return "UnnormalizableMet";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::AlignmentError: return "AlignmentError";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::CorruptModelFile: return "CorruptModelFile";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Base exception for every failure raised by the library. The code lets
/// callers (and the CLI's exit-code mapping) branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message)
        , code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace metrica
