#include "segeval/evaluation.hpp"

#include <algorithm>

#include "segeval/error.hpp"
#include "segeval/nifti.hpp"

namespace segeval {

std::vector<double> default_thresholds() {
    std::vector<double> out;
    for (int step = 1; step <= 10; ++step) out.push_back(step / 10.0);
    return out;
}

void validate_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.empty()) {
        throw Error(ErrorCode::invalid_argument, "threshold list is empty");
    }
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0 && thresholds[i] <= 1.0)) {
            throw Error(ErrorCode::invalid_argument, "threshold " + std::to_string(thresholds[i]) + " outside ]0,1]");
        }
        if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
            throw Error(ErrorCode::invalid_argument, "thresholds must be strictly ascending");
        }
    }
}

GroundTruthContext::GroundTruthContext(BinaryMask gt, const EvaluationOptions& options)
    : mask(std::move(gt)),
      border(extract_border(mask)),
      components(filter_small(connected_components(mask, options.connectivity), options.min_component_voxels)) {}

CohortRow evaluate_pair(const PatientCase& meta, const GroundTruthContext& gt, const BinaryMask& pred,
                        std::optional<double> threshold, const EvaluationOptions& options) {
    CohortRow row;
    row.patient_id = meta.patient_id;
    row.fold = meta.fold_id;
    row.tumor_type = meta.tumor_type;
    row.threshold = threshold;

    row.counts = confusion_counts(gt.mask, pred);
    row.voxel = voxel_metric_set(row.counts, options.ari);
    row.detection = patient_detection(row.counts, options.detection_threshold);
    row.distance = distance_report(gt.mask, gt.border, pred, options.hd95_mode);

    const ComponentLabeling pred_components =
        filter_small(connected_components(pred, options.connectivity), options.min_component_voxels);
    const InstancePairing pairing = pair_instances(gt.components, pred_components, options.pairing);
    row.object = object_metrics(pairing, gt.components, pred_components);

    row.gt_ml = physical_volume_ml(gt.mask);
    row.pred_ml = physical_volume_ml(pred);
    return row;
}

CohortRow evaluate_pair(const PatientCase& meta, const BinaryMask& gt, const BinaryMask& pred,
                        const EvaluationOptions& options) {
    return evaluate_pair(meta, GroundTruthContext(gt, options), pred, std::nullopt, options);
}

std::vector<CohortRow> threshold_sweep(const PatientCase& meta, const BinaryMask& gt, const VoxelGrid& pred,
                                       const std::vector<double>& thresholds, const EvaluationOptions& options) {
    check_geometry(gt.geometry(), pred.geometry());
    const GroundTruthContext context(gt, options);
    std::vector<CohortRow> rows;
    switch (pred.dtype()) {
        case DType::binary:
            rows.push_back(evaluate_pair(meta, context, BinaryMask(pred), std::nullopt, options));
            break;
        case DType::probability:
            validate_thresholds(thresholds);
            for (double t : thresholds) {
                rows.push_back(evaluate_pair(meta, context, binarize(pred, t), t, options));
            }
            break;
        case DType::raw_intensity:
            throw Error(ErrorCode::not_probability,
                        "prediction for '" + meta.patient_id + "' is neither binary nor a probability map");
    }
    return rows;
}

std::vector<CohortRow> threshold_sweep(const PatientCase& meta, const std::vector<double>& thresholds,
                                       const EvaluationOptions& options) {
    const VoxelGrid gt = load_nifti(meta.gt_path);
    const VoxelGrid pred = load_nifti(meta.pred_path);
    check_geometry(gt.geometry(), pred.geometry());
    if (gt.dtype() != DType::binary) {
        throw Error(ErrorCode::not_binary, "ground truth '" + meta.gt_path + "' is not a binary mask");
    }
    return threshold_sweep(meta, BinaryMask(gt), pred, thresholds, options);
}

}  // namespace segeval
