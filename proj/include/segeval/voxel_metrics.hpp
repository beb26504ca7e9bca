#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "segeval/volume.hpp"

namespace segeval {

/// A metric value, or std::nullopt when the metric is undefined for the
/// input (zero denominator). Undefined is never silently reported as 0.
using MetricValue = std::optional<double>;

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t x = 0;

    static ConfusionCounts from(std::uint64_t tp, std::uint64_t tn, std::uint64_t fp, std::uint64_t fn) {
        return {tp, tn, fp, fn, tp + tn + fp + fn};
    }
    bool consistent() const noexcept { return tp + tn + fp + fn == x; }
    ConfusionCounts swapped() const noexcept { return {tp, tn, fn, fp, x}; }

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion_counts(const BinaryMask& gt, const BinaryMask& pred);

struct OverlapMetrics {
    MetricValue tpr, tnr, fpr, fnr, ppv, dice, jaccard, iou, gce;
};

struct VolumeMetrics {
    MetricValue vs, ravd;
};

struct InformationMetrics {
    MetricValue h1, h2, h12, mi;
    MetricValue nmi, voi;
};

/// `corrected` is the standard pair-counting adjusted Rand index.
/// `as_printed` keeps a 2ab denominator term, which does not reach 1 for a
/// perfect segmentation.
enum class AriVariant { corrected, as_printed };

struct ProbabilisticMetrics {
    MetricValue cks, auc, mcc, pbd, ari;
};

OverlapMetrics overlap_metrics(const ConfusionCounts& c);
VolumeMetrics volume_metrics(const ConfusionCounts& c);
InformationMetrics information_metrics(const ConfusionCounts& c);
ProbabilisticMetrics probabilistic_metrics(const ConfusionCounts& c, AriVariant ari = AriVariant::corrected);

/// Adjusted Rand index alone, from the pair counts of the 2x2 contingency table.
MetricValue adjusted_rand_index(const ConfusionCounts& c, AriVariant variant = AriVariant::corrected);

inline constexpr std::size_t kVoxelMetricCount = 18;

struct VoxelMetricSet {
    MetricValue tpr, tnr, fpr, fnr, ppv, dice, jaccard, iou, gce;
    MetricValue auc, mcc, cks, nmi, voi, pbd, ari, vs, ravd;

    static constexpr std::array<std::string_view, kVoxelMetricCount> names{
        "tpr", "tnr", "fpr", "fnr", "ppv", "dice", "jaccard", "iou", "gce",
        "auc", "mcc", "cks", "nmi", "voi", "pbd", "ari", "vs", "ravd"};

    std::array<MetricValue, kVoxelMetricCount> values() const {
        return {tpr, tnr, fpr, fnr, ppv, dice, jaccard, iou, gce, auc, mcc, cks, nmi, voi, pbd, ari, vs, ravd};
    }
    // nullopt also for unknown names; use has_metric() to tell them apart.
    MetricValue get(std::string_view name) const;
    static bool has_metric(std::string_view name);
};

VoxelMetricSet voxel_metric_set(const ConfusionCounts& c, AriVariant ari = AriVariant::corrected);
VoxelMetricSet voxel_metric_set(const BinaryMask& gt, const BinaryMask& pred, AriVariant ari = AriVariant::corrected);

}  // namespace segeval
