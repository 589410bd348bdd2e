#pragma once

#include <stdexcept>
#include <string>

namespace malbench {

// Failure taxonomy shared by every module. Input/schema problems map to CLI
// exit code 2, numeric failures (diverged training) to exit code 3.
enum class ErrorKind {
    schema_mismatch,
    parse_error,
    empty_dataset,
    invalid_spec,
    empty_result,
    invalid_ratio,
    insufficient_class_rows,
    invalid_k,
    estimator_lacks_importance,
    unknown_column,
    k_too_large,
    non_finite_loss,
    length_mismatch,
    non_binary_value,
    single_class,
    fold_too_small,
    invalid_plan,
    shape_mismatch,
    io_error,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        return kind_ == ErrorKind::non_finite_loss ? 3 : 2;
    }

    const char* kind_name() const noexcept { return kind_name(kind_); }

    static const char* kind_name(ErrorKind kind) noexcept {
        switch (kind) {
            case ErrorKind::schema_mismatch: return "SchemaMismatch";
            case ErrorKind::parse_error: return "ParseError";
            case ErrorKind::empty_dataset: return "EmptyDataset";
            case ErrorKind::invalid_spec: return "InvalidSpec";
            case ErrorKind::empty_result: return "EmptyResult";
            case ErrorKind::invalid_ratio: return "InvalidRatio";
            case ErrorKind::insufficient_class_rows: return "InsufficientClassRows";
            case ErrorKind::invalid_k: return "InvalidK";
            case ErrorKind::estimator_lacks_importance: return "EstimatorLacksImportance";
            case ErrorKind::unknown_column: return "UnknownColumn";
            case ErrorKind::k_too_large: return "KTooLarge";
            case ErrorKind::non_finite_loss: return "NonFiniteLoss";
            case ErrorKind::length_mismatch: return "LengthMismatch";
            case ErrorKind::non_binary_value: return "NonBinaryValue";
            case ErrorKind::single_class: return "SingleClass";
            case ErrorKind::fold_too_small: return "FoldTooSmall";
            case ErrorKind::invalid_plan: return "InvalidPlan";
            case ErrorKind::shape_mismatch: return "ShapeMismatch";
            case ErrorKind::io_error: return "IoError";
        }
        return "Unknown";
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, std::string(Error::kind_name(kind)) + ": " + message);
}

}  // namespace malbench
