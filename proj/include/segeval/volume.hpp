#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace segeval {

using Dims = std::array<std::size_t, 3>;
using Spacing = std::array<double, 3>;  // mm per voxel along each axis

// Spacing tolerance used when comparing the geometry of two volumes.
inline constexpr double kSpacingTolerance = 1e-4;

/// Lattice shape plus physical voxel size. Voxel (i, j, k) lives at linear
/// index i + nx * (j + ny * k): the first axis varies fastest, matching the
/// NIfTI on-disk order.
struct Geometry {
    Dims dims{1, 1, 1};
    Spacing spacing{1.0, 1.0, 1.0};

    std::size_t voxel_count() const noexcept { return dims[0] * dims[1] * dims[2]; }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return i + dims[0] * (j + dims[1] * k);
    }
    double voxel_volume_mm3() const noexcept { return spacing[0] * spacing[1] * spacing[2]; }

    // Throws InvalidArgument unless dims >= 1 and spacing is positive and finite.
    void validate() const;
};

enum class DType { binary, probability, raw_intensity };

std::string to_string(DType dtype);

/// Immutable 3D scalar volume.
class VoxelGrid {
public:
    VoxelGrid(Geometry geometry, std::vector<double> values, DType dtype);

    const Geometry& geometry() const noexcept { return geometry_; }
    const Dims& dims() const noexcept { return geometry_.dims; }
    const Spacing& spacing() const noexcept { return geometry_.spacing; }
    DType dtype() const noexcept { return dtype_; }
    std::span<const double> values() const noexcept { return values_; }
    double at(std::size_t i, std::size_t j, std::size_t k) const { return values_[geometry_.index(i, j, k)]; }

private:
    Geometry geometry_;
    std::vector<double> values_;
    DType dtype_;
};

/// Binary volume stored as one byte per voxel, values in {0, 1}.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(Geometry geometry, std::vector<std::uint8_t> values);
    // Requires a grid tagged binary.
    explicit BinaryMask(const VoxelGrid& grid);

    static BinaryMask empty(Geometry geometry);

    const Geometry& geometry() const noexcept { return geometry_; }
    const Dims& dims() const noexcept { return geometry_.dims; }
    const Spacing& spacing() const noexcept { return geometry_.spacing; }
    std::span<const std::uint8_t> values() const noexcept { return values_; }
    bool at(std::size_t i, std::size_t j, std::size_t k) const { return values_[geometry_.index(i, j, k)] != 0; }

    std::size_t count() const noexcept;
    bool is_empty() const noexcept { return count() == 0; }

    VoxelGrid to_grid() const;

private:
    Geometry geometry_;
    std::vector<std::uint8_t> values_;
};

/// Classifies a value buffer: {0,1} -> binary, [0,1] -> probability, else raw.
DType infer_dtype(std::span<const double> values, bool integer_storage);

/// voxel = 1 iff value >= threshold. Threshold must lie in ]0, 1].
BinaryMask binarize(const VoxelGrid& map, double threshold);

/// Throws DimensionMismatch or SpacingMismatch (tolerance kSpacingTolerance mm).
void check_geometry(const Geometry& a, const Geometry& b);

double physical_volume_ml(const BinaryMask& mask);

enum class TumorType { glioblastoma, lgg, meningioma, metastasis, other };

std::string to_string(TumorType type);
TumorType parse_tumor_type(const std::string& text);

struct PatientCase {
    std::string patient_id;
    std::string gt_path;
    std::string pred_path;
    int fold_id = 0;
    TumorType tumor_type = TumorType::other;
};

}  // namespace segeval
