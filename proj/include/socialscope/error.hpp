#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace socialscope {

enum class ErrorCode {
    DuplicateId,
    DanglingEndpoint,
    MissingType,
    InvalidValue,
    InvalidArgument,
    EmptyKeywords,
    CompositionFnError,
    AggEvalError,
    DivideByZero,
    PatternTooLong,
    SyntaxError,
    DuplicateBinding,
    UnknownOperator,
    UnboundReference,
    ExecutionError,
    UnknownUser,
    UnknownItem,
    UnknownCriterionAttr,
    ParseError,
    IoError,
    SnapshotError,
};

inline std::string_view error_code_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorCode::MissingType: return "MissingType";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyKeywords: return "EmptyKeywords";
    case ErrorCode::CompositionFnError: return "CompositionFnError";
    case ErrorCode::AggEvalError: return "AggEvalError";
    case ErrorCode::DivideByZero: return "DivideByZero";
    case ErrorCode::PatternTooLong: return "PatternTooLong";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DuplicateBinding: return "DuplicateBinding";
    case ErrorCode::UnknownOperator: return "UnknownOperator";
    case ErrorCode::UnboundReference: return "UnboundReference";
    case ErrorCode::ExecutionError: return "ExecutionError";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::UnknownItem: return "UnknownItem";
    case ErrorCode::UnknownCriterionAttr: return "UnknownCriterionAttr";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SnapshotError: return "SnapshotError";
    }
    return "Unknown";
}

/// Base exception for every engine failure. The code identifies the failure
/// class; the message carries the offending ids.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message)
        , code_(code)
    {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Positioned DSL parse failure (1-based line and column).
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t col, std::string expected)
        : Error(ErrorCode::SyntaxError,
              "line " + std::to_string(line) + ", col " + std::to_string(col)
                  + ": expected " + expected)
        , line_(line)
        , col_(col)
        , expected_(std::move(expected))
    {}

    std::size_t line() const noexcept { return line_; }
    std::size_t col() const noexcept { return col_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t line_;
    std::size_t col_;
    std::string expected_;
};

/// Failure while evaluating one binding of a plan.
class ExecutionError : public Error {
public:
    ExecutionError(std::string binding, ErrorCode cause, const std::string& what)
        : Error(ErrorCode::ExecutionError, "binding '" + binding + "': " + what)
        , binding_(std::move(binding))
        , cause_(cause)
    {}

    const std::string& binding() const noexcept { return binding_; }
    ErrorCode cause() const noexcept { return cause_; }

private:
    std::string binding_;
    ErrorCode cause_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

} // namespace socialscope
