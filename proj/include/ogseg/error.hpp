#pragma once

#include <stdexcept>
#include <string>

namespace ogseg {

enum class ErrorCode {
    io,
    malformed_header,
    unsupported_format,
    truncated_payload,
    invalid_argument,
    dimension_mismatch,
    non_finite,
    rank_deficient,
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::malformed_header: return "malformed_header";
    case ErrorCode::unsupported_format: return "unsupported_format";
    case ErrorCode::truncated_payload: return "truncated_payload";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::rank_deficient: return "rank_deficient";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace ogseg
