#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segeval {

enum class ErrorCode {
    io_error,
    bad_magic,
    unsupported_datatype,
    bad_dimensionality,
    truncated_payload,
    dimension_mismatch,
    spacing_mismatch,
    invalid_argument,
    not_binary,
    not_probability,
    empty_surface,
    empty_ground_truth,
    degenerate_variance,
    too_few_rows,
    empty_fold_list,
    empty_manifest,
    config_error,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace segeval
