#pragma once

#include <span>
#include <vector>

#include "segeval/volume.hpp"
#include "segeval/voxel_metrics.hpp"

namespace segeval {

struct Point3 {
    double x = 0.0, y = 0.0, z = 0.0;
    friend bool operator==(const Point3&, const Point3&) = default;
};

inline double squared_distance(const Point3& a, const Point3& b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

inline Point3 physical_point(const Spacing& spacing, std::size_t i, std::size_t j, std::size_t k) noexcept {
    return {static_cast<double>(i) * spacing[0], static_cast<double>(j) * spacing[1],
            static_cast<double>(k) * spacing[2]};
}

/// Border voxels of a mask in physical coordinates (mm), in raster order.
struct SurfacePointSet {
    std::vector<Point3> points;

    bool empty() const noexcept { return points.empty(); }
    std::size_t size() const noexcept { return points.size(); }
};

/// Every 1-voxel with at least one 6-connected 0-neighbour; voxels outside the
/// lattice count as 0.
SurfacePointSet extract_border(const BinaryMask& mask);

/// For each point of `from`, the Euclidean distance to its nearest point of
/// `to`. Exact nearest-neighbour search. Throws EmptySurface if either is empty.
std::vector<double> directed_surface_distances(const SurfacePointSet& from, const SurfacePointSet& to);

enum class Hd95Mode {
    pooled,        // 95th percentile of both directed lists concatenated
    max_directed,  // max of the two per-direction 95th percentiles
};

inline constexpr double kHausdorffPercentile = 0.95;

struct DistanceReport {
    MetricValue hd95;  // mm
    MetricValue mhd;   // unitless
    MetricValue assd;  // mm
};

// Each returns nullopt when either mask (or surface) is empty.
MetricValue hd95(const BinaryMask& gt, const BinaryMask& pred, Hd95Mode mode = Hd95Mode::pooled);
MetricValue assd(const BinaryMask& gt, const BinaryMask& pred);
MetricValue mahalanobis(const BinaryMask& gt, const BinaryMask& pred);

MetricValue hd95(const SurfacePointSet& a, const SurfacePointSet& b, Hd95Mode mode = Hd95Mode::pooled);
MetricValue assd(const SurfacePointSet& a, const SurfacePointSet& b);

// Diagonal loading used when the pooled covariance is singular.
inline constexpr double kCovarianceRegularization = 1e-6;

/// Mahalanobis distance between the means of two point clouds under their
/// pooled covariance.
MetricValue mahalanobis(std::span<const Point3> a, std::span<const Point3> b);

/// Physical coordinates of every 1-voxel, in raster order.
std::vector<Point3> foreground_points(const BinaryMask& mask);

DistanceReport distance_report(const BinaryMask& gt, const BinaryMask& pred, Hd95Mode mode = Hd95Mode::pooled);
DistanceReport distance_report(const BinaryMask& gt, const SurfacePointSet& gt_border, const BinaryMask& pred,
                               Hd95Mode mode = Hd95Mode::pooled);

}  // namespace segeval
