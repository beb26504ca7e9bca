#pragma once

#include <optional>
#include <string>
#include <vector>

#include "segeval/instance_metrics.hpp"
#include "segeval/surface_metrics.hpp"
#include "segeval/volume.hpp"
#include "segeval/voxel_metrics.hpp"

namespace segeval {

struct EvaluationOptions {
    double detection_threshold = kDefaultDetectionThreshold;
    std::size_t min_component_voxels = kDefaultMinComponentVoxels;
    Connectivity connectivity = Connectivity::twenty_six;
    PairingStrategy pairing = PairingStrategy::greedy;
    Hd95Mode hd95_mode = Hd95Mode::pooled;
    AriVariant ari = AriVariant::corrected;
};

/// Ten equally spaced thresholds 0.1, 0.2, ..., 1.0.
std::vector<double> default_thresholds();

/// One patient evaluated at one threshold (or threshold-free for binary input).
struct CohortRow {
    std::string patient_id;
    int fold = 0;
    TumorType tumor_type = TumorType::other;
    std::optional<double> threshold;  // nullopt: prediction was already binary

    ConfusionCounts counts;
    VoxelMetricSet voxel;
    DistanceReport distance;
    ObjectMetricsRow object;
    PatientDetection detection;
    double gt_ml = 0.0;
    double pred_ml = 0.0;
};

/// Ground-truth derived data reused across the thresholds of one case.
struct GroundTruthContext {
    BinaryMask mask;
    SurfacePointSet border;
    ComponentLabeling components;  // already size-filtered

    GroundTruthContext(BinaryMask gt, const EvaluationOptions& options);
};

CohortRow evaluate_pair(const PatientCase& meta, const GroundTruthContext& gt, const BinaryMask& pred,
                        std::optional<double> threshold, const EvaluationOptions& options);

CohortRow evaluate_pair(const PatientCase& meta, const BinaryMask& gt, const BinaryMask& pred,
                        const EvaluationOptions& options = {});

/// Full metric rows for every threshold of a probability map, or a single
/// threshold-free row when the prediction is binary.
std::vector<CohortRow> threshold_sweep(const PatientCase& meta, const BinaryMask& gt, const VoxelGrid& pred,
                                       const std::vector<double>& thresholds, const EvaluationOptions& options = {});

/// Same, loading gt_path / pred_path from disk.
std::vector<CohortRow> threshold_sweep(const PatientCase& meta, const std::vector<double>& thresholds,
                                       const EvaluationOptions& options = {});

/// Throws InvalidArgument unless thresholds are in ]0,1], ascending and unique.
void validate_thresholds(const std::vector<double>& thresholds);

}  // namespace segeval
