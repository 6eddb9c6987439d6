#include "smw/error.hpp"

namespace smw {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidArgument: return "InvalidArgument";
        case ErrorCode::kNonPositiveDt: return "NonPositiveDt";
        case ErrorCode::kInvalidCommand: return "InvalidCommand";
        case ErrorCode::kUnstableStep: return "UnstableStep";
        case ErrorCode::kDegenerateTriangle: return "DegenerateTriangle";
        case ErrorCode::kCollinearBasis: return "CollinearBasis";
        case ErrorCode::kOutOfWorkspace: return "OutOfWorkspace";
        case ErrorCode::kShiftTooLarge: return "ShiftTooLarge";
        case ErrorCode::kIncompleteDataset: return "IncompleteDataset";
        case ErrorCode::kEmptyModel: return "EmptyModel";
        case ErrorCode::kCodeOutOfRange: return "CodeOutOfRange";
        case ErrorCode::kMissingEntry: return "MissingEntry";
        case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::kZeroLikelihood: return "ZeroLikelihood";
        case ErrorCode::kPrecondition: return "PreconditionViolation";
        case ErrorCode::kConfig: return "ConfigError";
        case ErrorCode::kIo: return "IoError";
        case ErrorCode::kKernelFailure: return "KernelFailure";
    }
    return "Unknown";
}

}  // namespace smw
