#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "segeval/evaluation.hpp"

namespace segeval {

/// Mean, sample standard deviation and size of one fold's values.
struct FoldStat {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
};

FoldStat fold_stat(std::span<const double> values);

struct PooledEstimate {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
    std::vector<FoldStat> folds;
};

/// Combines per-fold (mean, std, n) with the within + between fold variance:
///   mean = sum(n_i mu_i) / N
///   var  = [sum((n_i - 1) s_i^2) + sum(n_i (mu_i - mean)^2)] / (N - 1)
PooledEstimate pooled_estimates(std::span<const FoldStat> per_fold);

/// A pooled estimate of one metric across a cohort, with the number of rows
/// whose value was undefined (or non-finite) and therefore left out.
struct MetricSummary {
    std::optional<PooledEstimate> estimate;
    std::size_t excluded = 0;
};

using RowMetric = std::function<MetricValue(const CohortRow&)>;

/// Groups rows by fold, summarises each fold, then pools.
MetricSummary pooled_metric(std::span<const CohortRow> rows, const RowMetric& metric);

struct DetectionRates {
    double recall = 0.0;
    MetricValue precision;
    MetricValue f1;
    std::size_t true_positives = 0;
    std::size_t false_negatives = 0;
    std::size_t false_positives = 0;
};

/// Patient-wise rates. A nonempty sub-threshold prediction counts as one FN
/// and one FP. Requires a nonempty list.
DetectionRates detection_rates(std::span<const PatientDetection> detections);

/// Object-wise rates, micro-averaged over patients (summed pair counts).
struct ObjectRates {
    MetricValue recall, precision, f1;
    double fppp = 0.0;  // mean spurious components per patient
};

ObjectRates object_rates(std::span<const CohortRow> rows);

/// Dice over rows whose patient-wise status is true positive; nullopt when
/// nothing was detected.
std::optional<PooledEstimate> dice_tp(std::span<const CohortRow> rows);

/// Pearson coefficient of (gt volume, predicted volume). Throws TooFewRows
/// below two pairs and DegenerateVariance when either side is constant.
double volume_correlation(std::span<const std::pair<double, double>> volume_pairs);

struct VolumeSample {
    std::string patient_id;
    double gt_ml = 0.0;
    double dice = 0.0;
};

struct FiveNumberSummary {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

struct VolumeBin {
    double volume_min = 0.0;  // ml
    double volume_max = 0.0;  // ml
    std::size_t count = 0;
    std::optional<FiveNumberSummary> dice;
    std::vector<std::string> outliers;  // patient ids beyond 1.5 IQR
    std::vector<std::string> members;
};

enum class BinningMode { equal_count, equal_width };

inline constexpr std::size_t kDefaultVolumeBins = 10;

FiveNumberSummary five_number_summary(std::vector<double> values);

/// Sorts by gt volume (ties by patient id) and splits into bins. Equal-count
/// bins spread the remainder over the leftmost bins. Throws TooFewRows when
/// there are fewer samples than bins.
std::vector<VolumeBin> volume_binned_summary(std::vector<VolumeSample> samples,
                                             std::size_t n_bins = kDefaultVolumeBins,
                                             BinningMode mode = BinningMode::equal_count);

enum class CorrelationMethod { pearson, spearman };

struct MetricColumn {
    std::string name;
    std::vector<MetricValue> values;
};

struct CorrelationMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<MetricValue>> r;
    std::vector<std::vector<std::size_t>> n;  // pairwise-complete sample count
};

inline constexpr std::size_t kMinCorrelationSamples = 3;

/// Pairwise-complete correlations: each cell uses the rows where both
/// metrics are defined and finite. Cells with fewer than three such rows or
/// zero variance are undefined.
CorrelationMatrix metrics_correlation(std::span<const MetricColumn> columns,
                                      CorrelationMethod method = CorrelationMethod::pearson);

/// Threshold with the highest cohort mean Dice over thresholded rows; ties go
/// to the lower threshold. nullopt when no row carries a threshold.
std::optional<double> best_threshold(std::span<const CohortRow> rows);

/// Named per-row metrics: the 18 voxel metrics plus hd95, mhd, assd, oassd,
/// object recall/precision/f1, fppp, patient dice, gt_ml and pred_ml.
std::vector<std::string> row_metric_names();
RowMetric row_metric(const std::string& name);

}  // namespace segeval
