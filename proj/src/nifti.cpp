#include "segeval/nifti.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <vector>

#include "segeval/error.hpp"

namespace segeval {
namespace {

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kSingleFileOffset = 352;

using Bytes = std::vector<unsigned char>;

bool is_gzip(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
    }
    unsigned char prefix[2] = {0, 0};
    in.read(reinterpret_cast<char*>(prefix), 2);
    return in.gcount() == 2 && prefix[0] == 0x1F && prefix[1] == 0x8B;
}

// Reads up to max_bytes (all when max_bytes == 0), decompressing gzip input.
Bytes read_bytes(const std::string& path, std::size_t max_bytes = 0) {
    if (is_gzip(path)) {
        std::unique_ptr<gzFile_s, decltype(&gzclose)> gz(gzopen(path.c_str(), "rb"), &gzclose);
        if (!gz) {
            throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
        }
        Bytes out;
        std::vector<unsigned char> chunk(1 << 20);
        while (max_bytes == 0 || out.size() < max_bytes) {
            const std::size_t want = max_bytes == 0 ? chunk.size() : std::min(chunk.size(), max_bytes - out.size());
            const int got = gzread(gz.get(), chunk.data(), static_cast<unsigned>(want));
            if (got < 0) {
                throw Error(ErrorCode::io_error, "gzip stream error in '" + path + "'");
            }
            if (got == 0) break;
            out.insert(out.end(), chunk.begin(), chunk.begin() + got);
        }
        return out;
    }
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
    }
    std::size_t size = static_cast<std::size_t>(in.tellg());
    if (max_bytes != 0) size = std::min(size, max_bytes);
    Bytes out(size);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(size));
    return out;
}

template <typename T>
T read_scalar(const unsigned char* p, bool swap) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, p, sizeof(T));
    if (swap) std::reverse(buf, buf + sizeof(T));
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

template <typename T>
void write_scalar(unsigned char* p, T value) {
    static_assert(std::endian::native == std::endian::little);
    std::memcpy(p, &value, sizeof(T));
}

std::size_t datatype_bytes(NiftiDatatype type) {
    switch (type) {
        case NiftiDatatype::uint8: return 1;
        case NiftiDatatype::int16: return 2;
        case NiftiDatatype::int32: return 4;
        case NiftiDatatype::float32: return 4;
        case NiftiDatatype::float64: return 8;
    }
    return 0;
}

bool is_integer(NiftiDatatype type) {
    return type == NiftiDatatype::uint8 || type == NiftiDatatype::int16 || type == NiftiDatatype::int32;
}

NiftiHeader parse_header(const Bytes& bytes, const std::string& path) {
    if (bytes.size() < kHeaderSize) {
        throw Error(ErrorCode::truncated_payload, "'" + path + "' is shorter than a NIfTI-1 header");
    }
    const unsigned char* p = bytes.data();
    NiftiHeader header;
    const auto sizeof_hdr = read_scalar<std::int32_t>(p, false);
    if (sizeof_hdr == 348) {
        header.big_endian = false;
    } else if (read_scalar<std::int32_t>(p, true) == 348) {
        header.big_endian = true;
    } else {
        throw Error(ErrorCode::bad_magic, "'" + path + "': sizeof_hdr is not 348");
    }
    const bool swap = header.big_endian;

    if (std::memcmp(p + 344, "n+1\0", 4) == 0) {
        header.single_file = true;
    } else if (std::memcmp(p + 344, "ni1\0", 4) == 0) {
        header.single_file = false;
    } else {
        throw Error(ErrorCode::bad_magic, "'" + path + "': magic is neither \"n+1\" nor \"ni1\"");
    }

    std::int16_t dim[8];
    for (int d = 0; d < 8; ++d) dim[d] = read_scalar<std::int16_t>(p + 40 + 2 * d, swap);
    if (dim[0] != 3 && dim[0] != 4) {
        throw Error(ErrorCode::bad_dimensionality, "'" + path + "': dim[0] = " + std::to_string(dim[0]));
    }
    if (dim[0] == 4 && dim[4] != 1) {
        throw Error(ErrorCode::bad_dimensionality,
                    "'" + path + "': 4D volume with dim[4] = " + std::to_string(dim[4]));
    }
    for (int d = 1; d <= 3; ++d) {
        if (dim[d] < 1) {
            throw Error(ErrorCode::bad_dimensionality,
                        "'" + path + "': dim[" + std::to_string(d) + "] = " + std::to_string(dim[d]));
        }
        header.geometry.dims[d - 1] = static_cast<std::size_t>(dim[d]);
        header.geometry.spacing[d - 1] = read_scalar<float>(p + 76 + 4 * d, swap);
    }

    const auto code = read_scalar<std::int16_t>(p + 70, swap);
    switch (code) {
        case 2: case 4: case 8: case 16: case 64:
            header.datatype = static_cast<NiftiDatatype>(code);
            break;
        default:
            throw Error(ErrorCode::unsupported_datatype, "'" + path + "': datatype code " + std::to_string(code));
    }

    const float vox_offset = read_scalar<float>(p + 108, swap);
    if (header.single_file) {
        header.vox_offset = std::max<std::size_t>(kSingleFileOffset, static_cast<std::size_t>(std::max(0.0f, vox_offset)));
    } else {
        header.vox_offset = static_cast<std::size_t>(std::max(0.0f, vox_offset));
    }
    header.scl_slope = read_scalar<float>(p + 112, swap);
    header.scl_inter = read_scalar<float>(p + 116, swap);

    try {
        header.geometry.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::invalid_argument, "'" + path + "': " + e.what());
    }
    return header;
}

std::string image_path_for(const std::string& hdr_path) {
    const auto replace_suffix = [&](const std::string& from, const std::string& to) -> std::string {
        if (hdr_path.size() >= from.size() && hdr_path.compare(hdr_path.size() - from.size(), from.size(), from) == 0) {
            return hdr_path.substr(0, hdr_path.size() - from.size()) + to;
        }
        return {};
    };
    for (const auto& [from, to] : {std::pair{".hdr.gz", ".img.gz"}, std::pair{".hdr", ".img"}}) {
        if (auto img = replace_suffix(from, to); !img.empty()) return img;
    }
    throw Error(ErrorCode::io_error, "'" + hdr_path + "': two-file NIfTI needs a .hdr path");
}

double decode_voxel(const unsigned char* p, NiftiDatatype type, bool swap) {
    switch (type) {
        case NiftiDatatype::uint8: return *p;
        case NiftiDatatype::int16: return read_scalar<std::int16_t>(p, swap);
        case NiftiDatatype::int32: return read_scalar<std::int32_t>(p, swap);
        case NiftiDatatype::float32: return read_scalar<float>(p, swap);
        case NiftiDatatype::float64: return read_scalar<double>(p, swap);
    }
    return 0.0;
}

}  // namespace

NiftiHeader read_nifti_header(const std::string& path) {
    return parse_header(read_bytes(path, kHeaderSize), path);
}

VoxelGrid load_nifti(const std::string& path) {
    Bytes bytes = read_bytes(path);
    const NiftiHeader header = parse_header(bytes, path);

    Bytes image_storage;
    const Bytes* payload = &bytes;
    if (!header.single_file) {
        image_storage = read_bytes(image_path_for(path));
        payload = &image_storage;
    }

    const std::size_t count = header.geometry.voxel_count();
    const std::size_t width = datatype_bytes(header.datatype);
    const std::size_t needed = header.vox_offset + count * width;
    if (payload->size() < needed) {
        throw Error(ErrorCode::truncated_payload, "'" + path + "': expected " + std::to_string(count * width) +
                                                      " payload bytes, found " +
                                                      std::to_string(payload->size() > header.vox_offset
                                                                         ? payload->size() - header.vox_offset
                                                                         : 0));
    }

    std::vector<double> values(count);
    const unsigned char* data = payload->data() + header.vox_offset;
    for (std::size_t v = 0; v < count; ++v) {
        values[v] = decode_voxel(data + v * width, header.datatype, header.big_endian);
    }

    const bool scaled = std::isfinite(header.scl_slope) && std::isfinite(header.scl_inter) &&
                        header.scl_slope != 0.0 && !(header.scl_slope == 1.0 && header.scl_inter == 0.0);
    if (scaled) {
        for (double& v : values) v = v * header.scl_slope + header.scl_inter;
    }
    const bool integer_values = is_integer(header.datatype) && !scaled;
    const DType dtype = infer_dtype(values, integer_values);
    return VoxelGrid(header.geometry, std::move(values), dtype);
}

void save_nifti(const VoxelGrid& grid, const std::string& path, NiftiDatatype datatype) {
    const Geometry& g = grid.geometry();
    for (std::size_t axis = 0; axis < 3; ++axis) {
        if (g.dims[axis] > static_cast<std::size_t>(std::numeric_limits<std::int16_t>::max())) {
            throw Error(ErrorCode::invalid_argument, "dimension too large for NIfTI-1");
        }
    }
    const std::size_t width = datatype_bytes(datatype);
    Bytes out(kSingleFileOffset + g.voxel_count() * width, 0);
    unsigned char* p = out.data();
    write_scalar<std::int32_t>(p, 348);
    write_scalar<std::int16_t>(p + 40, 3);
    for (int d = 1; d <= 3; ++d) {
        write_scalar<std::int16_t>(p + 40 + 2 * d, static_cast<std::int16_t>(g.dims[d - 1]));
        write_scalar<float>(p + 76 + 4 * d, static_cast<float>(g.spacing[d - 1]));
    }
    for (int d = 4; d < 8; ++d) write_scalar<std::int16_t>(p + 40 + 2 * d, 1);
    write_scalar<std::int16_t>(p + 70, static_cast<std::int16_t>(datatype));
    write_scalar<std::int16_t>(p + 72, static_cast<std::int16_t>(width * 8));
    write_scalar<float>(p + 76, 1.0f);
    write_scalar<float>(p + 108, static_cast<float>(kSingleFileOffset));
    p[123] = 2;  // xyzt_units: mm
    std::memcpy(p + 344, "n+1\0", 4);

    unsigned char* data = p + kSingleFileOffset;
    const auto values = grid.values();
    for (std::size_t v = 0; v < values.size(); ++v) {
        const double value = values[v];
        unsigned char* dst = data + v * width;
        switch (datatype) {
            case NiftiDatatype::uint8: *dst = static_cast<std::uint8_t>(value); break;
            case NiftiDatatype::int16: write_scalar<std::int16_t>(dst, static_cast<std::int16_t>(value)); break;
            case NiftiDatatype::int32: write_scalar<std::int32_t>(dst, static_cast<std::int32_t>(value)); break;
            case NiftiDatatype::float32: write_scalar<float>(dst, static_cast<float>(value)); break;
            case NiftiDatatype::float64: write_scalar<double>(dst, value); break;
        }
    }

    const bool gzip = path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
    if (gzip) {
        std::unique_ptr<gzFile_s, decltype(&gzclose)> gz(gzopen(path.c_str(), "wb6"), &gzclose);
        if (!gz || gzwrite(gz.get(), out.data(), static_cast<unsigned>(out.size())) != static_cast<int>(out.size())) {
            throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
        }
        return;
    }
    std::ofstream file(path, std::ios::binary);
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!file) {
        throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
    }
}

}  // namespace segeval
