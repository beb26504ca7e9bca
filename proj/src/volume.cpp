#include "segeval/volume.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "segeval/error.hpp"

namespace segeval {

void Geometry::validate() const {
    for (std::size_t axis = 0; axis < 3; ++axis) {
        if (dims[axis] < 1) {
            throw Error(ErrorCode::invalid_argument, "dimension " + std::to_string(axis) + " is zero");
        }
        if (!std::isfinite(spacing[axis]) || spacing[axis] <= 0.0) {
            throw Error(ErrorCode::invalid_argument,
                        "spacing " + std::to_string(axis) + " must be positive and finite");
        }
    }
}

std::string to_string(DType dtype) {
    switch (dtype) {
        case DType::binary: return "binary";
        case DType::probability: return "probability";
        case DType::raw_intensity: return "raw-intensity";
    }
    return "unknown";
}

VoxelGrid::VoxelGrid(Geometry geometry, std::vector<double> values, DType dtype)
    : geometry_(geometry), values_(std::move(values)), dtype_(dtype) {
    geometry_.validate();
    if (values_.size() != geometry_.voxel_count()) {
        throw Error(ErrorCode::invalid_argument,
                    "value count " + std::to_string(values_.size()) + " does not match " +
                        std::to_string(geometry_.voxel_count()) + " voxels");
    }
    if (dtype_ == DType::binary &&
        !std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0 || v == 1.0; })) {
        throw Error(ErrorCode::not_binary, "binary grid holds values outside {0,1}");
    }
    if (dtype_ == DType::probability &&
        !std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0 && v <= 1.0; })) {
        throw Error(ErrorCode::not_probability, "probability grid holds values outside [0,1]");
    }
}

BinaryMask::BinaryMask(Geometry geometry, std::vector<std::uint8_t> values)
    : geometry_(geometry), values_(std::move(values)) {
    geometry_.validate();
    if (values_.size() != geometry_.voxel_count()) {
        throw Error(ErrorCode::invalid_argument, "mask size does not match geometry");
    }
    if (!std::all_of(values_.begin(), values_.end(), [](std::uint8_t v) { return v <= 1; })) {
        throw Error(ErrorCode::not_binary, "mask holds values outside {0,1}");
    }
}

BinaryMask::BinaryMask(const VoxelGrid& grid) : geometry_(grid.geometry()) {
    if (grid.dtype() != DType::binary) {
        throw Error(ErrorCode::not_binary, "grid is tagged " + to_string(grid.dtype()) + ", expected binary");
    }
    values_.resize(grid.values().size());
    std::transform(grid.values().begin(), grid.values().end(), values_.begin(),
                   [](double v) { return static_cast<std::uint8_t>(v != 0.0); });
}

BinaryMask BinaryMask::empty(Geometry geometry) {
    return BinaryMask(geometry, std::vector<std::uint8_t>(geometry.voxel_count(), 0));
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

VoxelGrid BinaryMask::to_grid() const {
    return VoxelGrid(geometry_, std::vector<double>(values_.begin(), values_.end()), DType::binary);
}

DType infer_dtype(std::span<const double> values, bool integer_storage) {
    const bool zero_one = std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0 || v == 1.0; });
    if (integer_storage) {
        return zero_one ? DType::binary : DType::raw_intensity;
    }
    const bool unit = std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
    return unit ? DType::probability : DType::raw_intensity;
}

BinaryMask binarize(const VoxelGrid& map, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw Error(ErrorCode::invalid_argument, "threshold " + std::to_string(threshold) + " outside ]0,1]");
    }
    if (map.dtype() != DType::probability && map.dtype() != DType::binary) {
        throw Error(ErrorCode::not_probability, "cannot binarize a " + to_string(map.dtype()) + " grid");
    }
    std::vector<std::uint8_t> out(map.values().size());
    std::transform(map.values().begin(), map.values().end(), out.begin(),
                   [threshold](double v) { return static_cast<std::uint8_t>(v >= threshold); });
    return BinaryMask(map.geometry(), std::move(out));
}

void check_geometry(const Geometry& a, const Geometry& b) {
    if (a.dims != b.dims) {
        throw Error(ErrorCode::dimension_mismatch,
                    "(" + std::to_string(a.dims[0]) + "," + std::to_string(a.dims[1]) + "," +
                        std::to_string(a.dims[2]) + ") vs (" + std::to_string(b.dims[0]) + "," +
                        std::to_string(b.dims[1]) + "," + std::to_string(b.dims[2]) + ")");
    }
    for (std::size_t axis = 0; axis < 3; ++axis) {
        if (std::abs(a.spacing[axis] - b.spacing[axis]) > kSpacingTolerance) {
            throw Error(ErrorCode::spacing_mismatch, "axis " + std::to_string(axis) + ": " +
                                                         std::to_string(a.spacing[axis]) + " vs " +
                                                         std::to_string(b.spacing[axis]) + " mm");
        }
    }
}

double physical_volume_ml(const BinaryMask& mask) {
    return static_cast<double>(mask.count()) * mask.geometry().voxel_volume_mm3() / 1000.0;
}

std::string to_string(TumorType type) {
    switch (type) {
        case TumorType::glioblastoma: return "glioblastoma";
        case TumorType::lgg: return "lgg";
        case TumorType::meningioma: return "meningioma";
        case TumorType::metastasis: return "metastasis";
        case TumorType::other: return "other";
    }
    return "other";
}

TumorType parse_tumor_type(const std::string& text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "glioblastoma" || lower == "gbm") return TumorType::glioblastoma;
    if (lower == "lgg" || lower == "lower_grade_glioma") return TumorType::lgg;
    if (lower == "meningioma") return TumorType::meningioma;
    if (lower == "metastasis" || lower == "metastases") return TumorType::metastasis;
    if (lower.empty() || lower == "other") return TumorType::other;
    throw Error(ErrorCode::invalid_argument, "unknown tumor type '" + text + "'");
}

}  // namespace segeval
