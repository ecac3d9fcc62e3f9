#ifndef METAGUARD_ERROR_HPP
#define METAGUARD_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace metaguard {

enum class ErrorCode {
  UnknownState,
  UnknownAction,
  UnknownTerminal,
  UnknownId,
  IndexOutOfRange,
  InvalidName,
  InvalidCollection,
  Incompatible,
  LabelClash,
  NameCollision,
  ValidationFailed,
  SubjectMismatch,
  BoundTooLarge,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownState: return "UNKNOWN_STATE";
    case ErrorCode::UnknownAction: return "UNKNOWN_ACTION";
    case ErrorCode::UnknownTerminal: return "UNKNOWN_TERMINAL";
    case ErrorCode::UnknownId: return "UNKNOWN_ID";
    case ErrorCode::IndexOutOfRange: return "INDEX_OUT_OF_RANGE";
    case ErrorCode::InvalidName: return "INVALID_NAME";
    case ErrorCode::InvalidCollection: return "INVALID_COLLECTION";
    case ErrorCode::Incompatible: return "INCOMPATIBLE";
    case ErrorCode::LabelClash: return "LABEL_CLASH";
    case ErrorCode::NameCollision: return "NAME_COLLISION";
    case ErrorCode::ValidationFailed: return "VALIDATION_FAILED";
    case ErrorCode::SubjectMismatch: return "SUBJECT_MISMATCH";
    case ErrorCode::BoundTooLarge: return "BOUND_TOO_LARGE";
    case ErrorCode::ParseError: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace metaguard

#endif  // METAGUARD_ERROR_HPP
