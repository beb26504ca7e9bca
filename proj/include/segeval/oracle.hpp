#pragma once

// Brute-force reference implementations. They share no code with the
// production kernels beyond the public data types, and favour literal
// transcription of the metric definitions over speed.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "segeval/instance_metrics.hpp"
#include "segeval/surface_metrics.hpp"
#include "segeval/voxel_metrics.hpp"

namespace segeval::oracle {

/// The 18 voxel metrics, in VoxelMetricSet::names order, evaluated from raw
/// voxel arrays: overlap ratios from explicit sums, ARI from explicit pair
/// enumeration, entropies from the empirical distributions.
std::array<MetricValue, kVoxelMetricCount> voxel_metrics(std::span<const std::uint8_t> gt,
                                                         std::span<const std::uint8_t> pred);

/// Builds gt/pred voxel arrays realising the given counts.
void realise_counts(const ConfusionCounts& c, std::vector<std::uint8_t>& gt, std::vector<std::uint8_t>& pred);

/// Adjusted Rand index exactly as typeset (numerator 2(ab - bc), ratio d).
MetricValue ari_as_printed(const ConfusionCounts& c);

std::vector<Point3> border_points(const BinaryMask& mask);

/// O(n*m) nearest-neighbour distances.
std::vector<double> directed_distances(std::span<const Point3> from, std::span<const Point3> to);

MetricValue hd95(const BinaryMask& gt, const BinaryMask& pred);
MetricValue assd(const BinaryMask& gt, const BinaryMask& pred);

/// Breadth-first flood fill, labels in raster order of the seed voxel.
std::vector<std::uint32_t> flood_fill_labels(const BinaryMask& mask, Connectivity connectivity);

}  // namespace segeval::oracle
