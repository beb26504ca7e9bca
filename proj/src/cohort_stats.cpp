#include "segeval/cohort_stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "segeval/error.hpp"
#include "segeval/statistics.hpp"

namespace segeval {

FoldStat fold_stat(std::span<const double> values) {
    return {mean(values), sample_std(values), values.size()};
}

PooledEstimate pooled_estimates(std::span<const FoldStat> per_fold) {
    if (per_fold.empty()) {
        throw Error(ErrorCode::empty_fold_list, "pooled estimate needs at least one fold");
    }
    PooledEstimate out;
    out.folds.assign(per_fold.begin(), per_fold.end());
    double weighted = 0.0, unweighted = 0.0;
    bool equal_sizes = true;
    for (const FoldStat& f : per_fold) {
        if (f.n < 1 || f.std < 0.0) {
            throw Error(ErrorCode::invalid_argument, "fold with n < 1 or negative std");
        }
        out.n += f.n;
        weighted += static_cast<double>(f.n) * f.mean;
        unweighted += f.mean;
        equal_sizes = equal_sizes && f.n == per_fold[0].n;
    }
    if (per_fold.size() == 1) {
        out.mean = per_fold[0].mean;
        out.std = per_fold[0].std;
        return out;
    }
    // Equal fold sizes reduce to the plain mean of means; computing it that way keeps it exact.
    out.mean = equal_sizes ? unweighted / static_cast<double>(per_fold.size())
                           : weighted / static_cast<double>(out.n);
    double within = 0.0, between = 0.0;
    for (const FoldStat& f : per_fold) {
        within += static_cast<double>(f.n - 1) * f.std * f.std;
        between += static_cast<double>(f.n) * (f.mean - out.mean) * (f.mean - out.mean);
    }
    out.std = std::sqrt((within + between) / static_cast<double>(out.n - 1));
    return out;
}

MetricSummary pooled_metric(std::span<const CohortRow> rows, const RowMetric& metric) {
    MetricSummary out;
    std::map<int, std::vector<double>> by_fold;
    for (const CohortRow& row : rows) {
        const MetricValue value = metric(row);
        if (value && std::isfinite(*value)) {
            by_fold[row.fold].push_back(*value);
        } else {
            ++out.excluded;
        }
    }
    if (by_fold.empty()) return out;
    std::vector<FoldStat> stats;
    for (const auto& [fold, values] : by_fold) stats.push_back(fold_stat(values));
    out.estimate = pooled_estimates(stats);
    return out;
}

DetectionRates detection_rates(std::span<const PatientDetection> detections) {
    if (detections.empty()) {
        throw Error(ErrorCode::too_few_rows, "detection rates need at least one patient");
    }
    DetectionRates out;
    for (const PatientDetection& d : detections) {
        switch (d.status) {
            case DetectionStatus::true_positive: ++out.true_positives; break;
            case DetectionStatus::false_negative_with_fp:
                ++out.false_negatives;
                ++out.false_positives;
                break;
            case DetectionStatus::false_negative_empty: ++out.false_negatives; break;
        }
    }
    const auto tp = static_cast<double>(out.true_positives);
    out.recall = tp / static_cast<double>(out.true_positives + out.false_negatives);
    if (out.true_positives + out.false_positives > 0) {
        out.precision = tp / static_cast<double>(out.true_positives + out.false_positives);
        out.f1 = (out.recall + *out.precision) > 0.0
                     ? 2.0 * out.recall * *out.precision / (out.recall + *out.precision)
                     : 0.0;
    }
    return out;
}

ObjectRates object_rates(std::span<const CohortRow> rows) {
    ObjectRates out;
    std::size_t matched = 0, missed = 0, spurious = 0;
    for (const CohortRow& row : rows) {
        matched += row.object.matched;
        missed += row.object.unmatched_gt;
        spurious += row.object.unmatched_pred;
    }
    if (matched + missed > 0) out.recall = static_cast<double>(matched) / static_cast<double>(matched + missed);
    if (matched + spurious > 0) out.precision = static_cast<double>(matched) / static_cast<double>(matched + spurious);
    if (out.recall && out.precision) {
        const double sum = *out.recall + *out.precision;
        out.f1 = sum > 0.0 ? 2.0 * *out.recall * *out.precision / sum : 0.0;
    }
    if (!rows.empty()) out.fppp = static_cast<double>(spurious) / static_cast<double>(rows.size());
    return out;
}

std::optional<PooledEstimate> dice_tp(std::span<const CohortRow> rows) {
    const MetricSummary summary = pooled_metric(rows, [](const CohortRow& row) -> MetricValue {
        if (row.detection.status != DetectionStatus::true_positive) return std::nullopt;
        return row.voxel.dice;
    });
    return summary.estimate;
}

double volume_correlation(std::span<const std::pair<double, double>> volume_pairs) {
    if (volume_pairs.size() < 2) {
        throw Error(ErrorCode::too_few_rows, "volume correlation needs at least two patients");
    }
    std::vector<double> gt, pred;
    for (const auto& [g, p] : volume_pairs) {
        gt.push_back(g);
        pred.push_back(p);
    }
    const auto r = pearson(gt, pred);
    if (!r) {
        throw Error(ErrorCode::degenerate_variance, "volume correlation with zero variance");
    }
    return *r;
}

FiveNumberSummary five_number_summary(std::vector<double> values) {
    if (values.empty()) {
        throw Error(ErrorCode::too_few_rows, "five-number summary of an empty set");
    }
    std::sort(values.begin(), values.end());
    return {values.front(), percentile_sorted(values, 0.25), percentile_sorted(values, 0.5),
            percentile_sorted(values, 0.75), values.back()};
}

std::vector<VolumeBin> volume_binned_summary(std::vector<VolumeSample> samples, std::size_t n_bins,
                                             BinningMode mode) {
    if (n_bins == 0 || samples.size() < n_bins) {
        throw Error(ErrorCode::too_few_rows, std::to_string(samples.size()) + " samples for " +
                                                 std::to_string(n_bins) + " volume bins");
    }
    std::sort(samples.begin(), samples.end(), [](const VolumeSample& a, const VolumeSample& b) {
        if (a.gt_ml != b.gt_ml) return a.gt_ml < b.gt_ml;
        return a.patient_id < b.patient_id;
    });

    // Membership as [begin, end) ranges of the sorted samples.
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    std::vector<std::pair<double, double>> bounds;
    if (mode == BinningMode::equal_count) {
        const std::size_t base = samples.size() / n_bins;
        const std::size_t extra = samples.size() % n_bins;
        std::size_t begin = 0;
        for (std::size_t b = 0; b < n_bins; ++b) {
            const std::size_t end = begin + base + (b < extra ? 1 : 0);
            ranges.emplace_back(begin, end);
            bounds.emplace_back(samples[begin].gt_ml, samples[end - 1].gt_ml);
            begin = end;
        }
    } else {
        const double lo = samples.front().gt_ml;
        const double hi = samples.back().gt_ml;
        const double width = (hi - lo) / static_cast<double>(n_bins);
        std::size_t begin = 0;
        for (std::size_t b = 0; b < n_bins; ++b) {
            const double upper = b + 1 == n_bins ? hi : lo + width * static_cast<double>(b + 1);
            std::size_t end = begin;
            while (end < samples.size() && (b + 1 == n_bins || samples[end].gt_ml < upper)) ++end;
            ranges.emplace_back(begin, end);
            bounds.emplace_back(lo + width * static_cast<double>(b), upper);
            begin = end;
        }
    }

    std::vector<VolumeBin> bins;
    for (std::size_t b = 0; b < n_bins; ++b) {
        VolumeBin bin;
        std::tie(bin.volume_min, bin.volume_max) = bounds[b];
        const auto [begin, end] = ranges[b];
        bin.count = end - begin;
        if (bin.count > 0) {
            std::vector<double> dice;
            for (std::size_t i = begin; i < end; ++i) {
                dice.push_back(samples[i].dice);
                bin.members.push_back(samples[i].patient_id);
            }
            const FiveNumberSummary summary = five_number_summary(dice);
            const double iqr = summary.q3 - summary.q1;
            for (std::size_t i = begin; i < end; ++i) {
                if (samples[i].dice < summary.q1 - 1.5 * iqr || samples[i].dice > summary.q3 + 1.5 * iqr) {
                    bin.outliers.push_back(samples[i].patient_id);
                }
            }
            bin.dice = summary;
        }
        bins.push_back(std::move(bin));
    }
    return bins;
}

CorrelationMatrix metrics_correlation(std::span<const MetricColumn> columns, CorrelationMethod method) {
    CorrelationMatrix out;
    const std::size_t m = columns.size();
    out.r.assign(m, std::vector<MetricValue>(m));
    out.n.assign(m, std::vector<std::size_t>(m, 0));
    for (const MetricColumn& c : columns) out.names.push_back(c.name);

    const auto usable = [](const MetricValue& v) { return v && std::isfinite(*v); };
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a; b < m; ++b) {
            const auto& va = columns[a].values;
            const auto& vb = columns[b].values;
            if (va.size() != vb.size()) {
                throw Error(ErrorCode::invalid_argument, "metric columns differ in length");
            }
            std::vector<double> x, y;
            for (std::size_t i = 0; i < va.size(); ++i) {
                if (usable(va[i]) && usable(vb[i])) {
                    x.push_back(*va[i]);
                    y.push_back(*vb[i]);
                }
            }
            MetricValue r;
            if (x.size() >= kMinCorrelationSamples) {
                r = method == CorrelationMethod::pearson ? pearson(x, y) : spearman(x, y);
                if (a == b && r) r = 1.0;
            }
            out.r[a][b] = out.r[b][a] = r;
            out.n[a][b] = out.n[b][a] = x.size();
        }
    }
    return out;
}

std::optional<double> best_threshold(std::span<const CohortRow> rows) {
    std::map<double, std::pair<double, std::size_t>> totals;
    for (const CohortRow& row : rows) {
        if (!row.threshold || !row.voxel.dice) continue;
        auto& [sum, count] = totals[*row.threshold];
        sum += *row.voxel.dice;
        ++count;
    }
    std::optional<double> best;
    double best_mean = -1.0;
    for (const auto& [threshold, total] : totals) {  // ascending, so ties keep the lower threshold
        const double m = total.first / static_cast<double>(total.second);
        if (m > best_mean) {
            best_mean = m;
            best = threshold;
        }
    }
    return best;
}

std::vector<std::string> row_metric_names() {
    std::vector<std::string> names(VoxelMetricSet::names.begin(), VoxelMetricSet::names.end());
    for (const char* extra : {"hd95", "mhd", "assd", "oassd", "object_recall", "object_precision", "object_f1",
                              "fppp", "patient_dice", "gt_ml", "pred_ml"}) {
        names.emplace_back(extra);
    }
    return names;
}

RowMetric row_metric(const std::string& name) {
    if (VoxelMetricSet::has_metric(name)) {
        return [name](const CohortRow& row) { return row.voxel.get(name); };
    }
    if (name == "hd95") return [](const CohortRow& row) { return row.distance.hd95; };
    if (name == "mhd") return [](const CohortRow& row) { return row.distance.mhd; };
    if (name == "assd") return [](const CohortRow& row) { return row.distance.assd; };
    if (name == "oassd") return [](const CohortRow& row) { return row.object.oassd; };
    if (name == "object_recall") {
        return [](const CohortRow& row) -> MetricValue {
            if (row.object.recall_undefined) return std::nullopt;
            return row.object.recall;
        };
    }
    if (name == "object_precision") {
        return [](const CohortRow& row) -> MetricValue {
            if (row.object.precision_undefined) return std::nullopt;
            return row.object.precision;
        };
    }
    if (name == "object_f1") return [](const CohortRow& row) -> MetricValue { return row.object.f1; };
    if (name == "fppp") return [](const CohortRow& row) -> MetricValue { return static_cast<double>(row.object.fppp); };
    if (name == "patient_dice") return [](const CohortRow& row) -> MetricValue { return row.detection.patient_dice; };
    if (name == "gt_ml") return [](const CohortRow& row) -> MetricValue { return row.gt_ml; };
    if (name == "pred_ml") return [](const CohortRow& row) -> MetricValue { return row.pred_ml; };
    throw Error(ErrorCode::invalid_argument, "unknown metric '" + name + "'");
}

}  // namespace segeval
