#include "claimsbench/errors.hpp"

namespace claimsbench {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::FileUnreadable: return "FileUnreadable";
        case ErrorKind::EmptyFile: return "EmptyFile";
        case ErrorKind::SchemaMismatch: return "SchemaMismatch";
        case ErrorKind::BadConfig: return "BadConfig";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::InvalidTrace: return "InvalidTrace";
        case ErrorKind::WeightSumInvalid: return "WeightSumInvalid";
        case ErrorKind::MissingVmtYear: return "MissingVmtYear";
        case ErrorKind::ZeroExposure: return "ZeroExposure";
        case ErrorKind::MissingRegion: return "MissingRegion";
        case ErrorKind::ZeroMileage: return "ZeroMileage";
        case ErrorKind::BaselineZero: return "BaselineZero";
        case ErrorKind::ConfidenceMismatch: return "ConfidenceMismatch";
        case ErrorKind::DivisionByZero: return "DivisionByZero";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::NoConvergence: return "NoConvergence";
    }
    return "Unknown";
}

ExitCode Error::exit_code() const noexcept {
    switch (kind_) {
        case ErrorKind::FileUnreadable:
        case ErrorKind::EmptyFile:
        case ErrorKind::SchemaMismatch:
        case ErrorKind::BadConfig:
            return ExitCode::Schema;
        case ErrorKind::NoConvergence:
            return ExitCode::Numerical;
        default:
            return ExitCode::Invariant;
    }
}

}  // namespace claimsbench
