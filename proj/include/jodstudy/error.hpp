#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jodstudy {

enum class ErrorCode {
    LadderTooShort,
    InvalidConfig,
    EmptyHistory,
    QuizAlreadyFinished,
    EmptyStats,
    UnknownCondition,
    NoComparisons,
    InvalidProbability,
    DomainError,
    DisconnectedGraph,
    NotConverged,
    EmptyInput,
    UnknownStudy,
    UnknownSession,
    SessionFinished,
    PairMismatch,
    MalformedInput,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::LadderTooShort: return "LadderTooShort";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::EmptyHistory: return "EmptyHistory";
        case ErrorCode::QuizAlreadyFinished: return "QuizAlreadyFinished";
        case ErrorCode::EmptyStats: return "EmptyStats";
        case ErrorCode::UnknownCondition: return "UnknownCondition";
        case ErrorCode::NoComparisons: return "NoComparisons";
        case ErrorCode::InvalidProbability: return "InvalidProbability";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::UnknownStudy: return "UnknownStudy";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::SessionFinished: return "SessionFinished";
        case ErrorCode::PairMismatch: return "PairMismatch";
        case ErrorCode::MalformedInput: return "MalformedInput";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so that
/// callers (HTTP layer, CLI) can map it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace jodstudy
