#pragma once

#include <cstdint>
#include <string>

#include "segeval/volume.hpp"

namespace segeval {

// Datatype codes accepted by the reader.
enum class NiftiDatatype : std::int16_t {
    uint8 = 2,
    int16 = 4,
    int32 = 8,
    float32 = 16,
    float64 = 64,
};

struct NiftiHeader {
    Geometry geometry;
    NiftiDatatype datatype = NiftiDatatype::uint8;
    bool big_endian = false;
    bool single_file = true;  // "n+1" vs "ni1" (.hdr/.img pair)
    std::size_t vox_offset = 352;
    double scl_slope = 0.0;
    double scl_inter = 0.0;
};

/// Parses and validates only the 348-byte header. Gzip input is detected by
/// its magic bytes, not by the file extension.
NiftiHeader read_nifti_header(const std::string& path);

/// Loads a NIfTI-1 volume. Orientation fields are ignored; 4D files are
/// accepted when dim[4] == 1.
VoxelGrid load_nifti(const std::string& path);

/// Writes a single-file NIfTI-1 volume, gzip-compressed when the path ends
/// in ".gz". Values must be representable in the requested datatype.
void save_nifti(const VoxelGrid& grid, const std::string& path, NiftiDatatype datatype);

}  // namespace segeval
