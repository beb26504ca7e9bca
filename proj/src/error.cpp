#include "segeval/error.hpp"

namespace segeval {

std::string_view error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::io_error: return "IoError";
        case ErrorCode::bad_magic: return "BadMagic";
        case ErrorCode::unsupported_datatype: return "UnsupportedDatatype";
        case ErrorCode::bad_dimensionality: return "BadDimensionality";
        case ErrorCode::truncated_payload: return "TruncatedPayload";
        case ErrorCode::dimension_mismatch: return "DimensionMismatch";
        case ErrorCode::spacing_mismatch: return "SpacingMismatch";
        case ErrorCode::invalid_argument: return "InvalidArgument";
        case ErrorCode::not_binary: return "NotBinary";
        case ErrorCode::not_probability: return "NotProbability";
        case ErrorCode::empty_surface: return "EmptySurface";
        case ErrorCode::empty_ground_truth: return "EmptyGroundTruth";
        case ErrorCode::degenerate_variance: return "DegenerateVariance";
        case ErrorCode::too_few_rows: return "TooFewRows";
        case ErrorCode::empty_fold_list: return "EmptyFoldList";
        case ErrorCode::empty_manifest: return "EmptyManifest";
        case ErrorCode::config_error: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace segeval
