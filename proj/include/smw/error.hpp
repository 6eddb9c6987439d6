#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smw {

enum class ErrorCode {
    kInvalidArgument,
    kNonPositiveDt,
    kInvalidCommand,
    kUnstableStep,
    kDegenerateTriangle,
    kCollinearBasis,
    kOutOfWorkspace,
    kShiftTooLarge,
    kIncompleteDataset,
    kEmptyModel,
    kCodeOutOfRange,
    kMissingEntry,
    kIndexOutOfRange,
    kZeroLikelihood,
    kPrecondition,
    kConfig,
    kIo,
    kKernelFailure,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

}  // namespace smw
