#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agreement {

enum class ErrorCode {
    SyntaxError,
    DuplicateLabel,
    EmptySubtree,
    InvalidTree,
    EmptyRestriction,
    MultiLabeledInput,
    LabelNotCovered,
    LabelUniverseMismatch,
    AlreadyDeleted,
    DeadVertex,
    InvalidPosition,
    NicenessViolated,
    InvalidProfile,
    CapExceeded,
    BadConfig,
};

inline const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::EmptySubtree: return "EmptySubtree";
    case ErrorCode::InvalidTree: return "InvalidTree";
    case ErrorCode::EmptyRestriction: return "EmptyRestriction";
    case ErrorCode::MultiLabeledInput: return "MultiLabeledInput";
    case ErrorCode::LabelNotCovered: return "LabelNotCovered";
    case ErrorCode::LabelUniverseMismatch: return "LabelUniverseMismatch";
    case ErrorCode::AlreadyDeleted: return "AlreadyDeleted";
    case ErrorCode::DeadVertex: return "DeadVertex";
    case ErrorCode::InvalidPosition: return "InvalidPosition";
    case ErrorCode::NicenessViolated: return "NicenessViolated";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::BadConfig: return "BadConfig";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable code. Parse errors also carry the
/// character offset at which they were detected.
class Error : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    Error(ErrorCode code, const std::string& what, std::size_t offset = npos)
        : std::runtime_error(std::string(to_string(code)) + ": " + what)
        , code_(code)
        , offset_(offset)
    {
    }

    ErrorCode code() const noexcept { return code_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    ErrorCode code_;
    std::size_t offset_;
};

} // namespace agreement
