#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "segeval/volume.hpp"

namespace segeval::test {

using Voxel = std::array<std::size_t, 3>;

inline Geometry grid(std::size_t nx, std::size_t ny, std::size_t nz, Spacing spacing = {1.0, 1.0, 1.0}) {
    return Geometry{{nx, ny, nz}, spacing};
}

inline BinaryMask voxels(const Geometry& g, const std::vector<Voxel>& ones) {
    std::vector<std::uint8_t> v(g.voxel_count(), 0);
    for (const auto& p : ones) v[g.index(p[0], p[1], p[2])] = 1;
    return BinaryMask(g, std::move(v));
}

// Half-open box [lo, hi).
inline BinaryMask box(const Geometry& g, Voxel lo, Voxel hi) {
    std::vector<std::uint8_t> v(g.voxel_count(), 0);
    for (std::size_t k = lo[2]; k < hi[2]; ++k)
        for (std::size_t j = lo[1]; j < hi[1]; ++j)
            for (std::size_t i = lo[0]; i < hi[0]; ++i) v[g.index(i, j, k)] = 1;
    return BinaryMask(g, std::move(v));
}

inline BinaryMask sphere(const Geometry& g, std::array<double, 3> centre, double radius) {
    std::vector<std::uint8_t> v(g.voxel_count(), 0);
    for (std::size_t k = 0; k < g.dims[2]; ++k)
        for (std::size_t j = 0; j < g.dims[1]; ++j)
            for (std::size_t i = 0; i < g.dims[0]; ++i) {
                const double dx = static_cast<double>(i) - centre[0];
                const double dy = static_cast<double>(j) - centre[1];
                const double dz = static_cast<double>(k) - centre[2];
                v[g.index(i, j, k)] = dx * dx + dy * dy + dz * dz <= radius * radius ? 1 : 0;
            }
    return BinaryMask(g, std::move(v));
}

inline BinaryMask random_mask(const Geometry& g, double density, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(density);
    std::vector<std::uint8_t> v(g.voxel_count());
    for (auto& x : v) x = coin(rng) ? 1 : 0;
    return BinaryMask(g, std::move(v));
}

inline BinaryMask combine(const BinaryMask& a, const BinaryMask& b, bool both) {
    std::vector<std::uint8_t> v(a.values().size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = both ? (a.values()[i] & b.values()[i]) : (a.values()[i] | b.values()[i]);
    }
    return BinaryMask(a.geometry(), std::move(v));
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("segeval_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace segeval::test
