#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "segeval/surface_metrics.hpp"
#include "segeval/volume.hpp"
#include "segeval/voxel_metrics.hpp"

namespace segeval {

enum class Connectivity { six = 6, eighteen = 18, twenty_six = 26 };

Connectivity parse_connectivity(int neighbours);

inline constexpr std::size_t kDefaultMinComponentVoxels = 50;
inline constexpr double kDefaultDetectionThreshold = 0.001;

struct ComponentInfo {
    std::size_t voxel_count = 0;
    std::array<std::size_t, 3> bbox_min{};
    std::array<std::size_t, 3> bbox_max{};  // inclusive
};

/// Dense labelling: 0 is background, components are 1..K numbered in the
/// raster order of their first voxel.
struct ComponentLabeling {
    Geometry geometry;
    std::vector<std::uint32_t> labels;
    std::vector<ComponentInfo> components;  // components[label - 1]

    std::size_t component_count() const noexcept { return components.size(); }
    const ComponentInfo& info(std::uint32_t label) const { return components.at(label - 1); }
};

ComponentLabeling connected_components(const BinaryMask& mask, Connectivity connectivity = Connectivity::twenty_six);

/// Drops components with fewer than min_voxels voxels and renumbers the rest
/// in their original order.
ComponentLabeling filter_small(const ComponentLabeling& labeling, std::size_t min_voxels = kDefaultMinComponentVoxels);

/// Border points of one component, evaluated on that component alone.
SurfacePointSet component_border(const ComponentLabeling& labeling, std::uint32_t label);

struct InstancePair {
    std::uint32_t gt_label = 0;
    std::uint32_t pred_label = 0;
    double dice = 0.0;
};

struct InstancePairing {
    std::vector<InstancePair> pairs;
    std::vector<std::uint32_t> unmatched_gt;
    std::vector<std::uint32_t> unmatched_pred;
};

enum class PairingStrategy {
    greedy,   // repeatedly take the highest-Dice free pair
    optimal,  // maximum total Dice assignment
};

/// Matches gt and prediction components. Pairs with zero overlap never match.
/// Greedy ties are broken by larger gt component, then lower gt label, then
/// lower prediction label.
InstancePairing pair_instances(const ComponentLabeling& gt, const ComponentLabeling& pred,
                               PairingStrategy strategy = PairingStrategy::greedy);

enum class DetectionStatus { true_positive, false_negative_with_fp, false_negative_empty };

std::string to_string(DetectionStatus status);

struct PatientDetection {
    DetectionStatus status = DetectionStatus::false_negative_empty;
    double patient_dice = 0.0;
};

/// Whole-mask detection: true positive iff Dice > threshold (strict).
/// Throws EmptyGroundTruth when gt has no foreground.
PatientDetection patient_detection(const BinaryMask& gt, const BinaryMask& pred,
                                   double threshold = kDefaultDetectionThreshold);
PatientDetection patient_detection(const ConfusionCounts& counts, double threshold = kDefaultDetectionThreshold);

struct ObjectMetricsRow {
    std::size_t matched = 0;
    std::size_t unmatched_gt = 0;
    std::size_t unmatched_pred = 0;

    // Undefined ratios are stored as 0 and flagged.
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
    bool recall_undefined = false;
    bool precision_undefined = false;

    std::size_t fppp = 0;  // spurious prediction components in this patient
    MetricValue oassd;     // mm, mean per-pair ASSD
};

ObjectMetricsRow object_metrics(const InstancePairing& pairing, const ComponentLabeling& gt,
                                const ComponentLabeling& pred);

}  // namespace segeval
