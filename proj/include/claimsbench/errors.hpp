#pragma once

#include <stdexcept>
#include <string>

namespace claimsbench {

// Process exit codes shared by the CLI and the error taxonomy.
enum class ExitCode : int {
    Ok = 0,
    Failure = 1,
    Schema = 2,
    Invariant = 3,
    Numerical = 4,
};

enum class ErrorKind {
    // input / schema
    FileUnreadable,
    EmptyFile,
    SchemaMismatch,
    BadConfig,
    // invariant violations
    MalformedRow,
    InvalidTrace,
    WeightSumInvalid,
    MissingVmtYear,
    ZeroExposure,
    MissingRegion,
    ZeroMileage,
    BaselineZero,
    ConfidenceMismatch,
    DivisionByZero,
    InvariantViolation,
    // numerics
    NoConvergence,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    ExitCode exit_code() const noexcept;

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace claimsbench
