#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>

#include "csv.hpp"
#include "segeval/error.hpp"
#include "segeval/nifti.hpp"
#include "segeval/report.hpp"
#include "segeval/statistics.hpp"

namespace segeval {
namespace {

struct CaseFailure {
    std::string patient_id;
    std::string error;
    std::string message;
};

bool row_order(const CohortRow& a, const CohortRow& b) {
    if (a.patient_id != b.patient_id) return a.patient_id < b.patient_id;
    return a.threshold < b.threshold;  // nullopt first
}

std::string threshold_cell(const std::optional<double>& t) { return t ? csv::metric(*t) : csv::kMissing; }

// Metrics summarised with the pooled fold estimate in cohort_summary.csv.
std::vector<std::string> pooled_metric_names() {
    std::vector<std::string> names(VoxelMetricSet::names.begin(), VoxelMetricSet::names.end());
    for (const char* extra : {"hd95", "mhd", "assd", "oassd", "patient_dice"}) names.emplace_back(extra);
    return names;
}

void push_estimate(std::vector<std::string>& cells, const std::optional<PooledEstimate>& e) {
    if (e) {
        cells.push_back(csv::metric(e->mean));
        cells.push_back(csv::metric(e->std));
        cells.push_back(csv::count(e->n));
    } else {
        cells.insert(cells.end(), {csv::kMissing, csv::kMissing, "0"});
    }
}

std::map<int, std::vector<CohortRow>> by_fold(std::span<const CohortRow> rows) {
    std::map<int, std::vector<CohortRow>> out;
    for (const CohortRow& row : rows) out[row.fold].push_back(row);
    return out;
}

std::vector<PatientDetection> detections_of(std::span<const CohortRow> rows) {
    std::vector<PatientDetection> out;
    for (const CohortRow& row : rows) out.push_back(row.detection);
    return out;
}

struct RateColumns {
    MetricValue patient_recall, patient_precision, patient_f1;
    MetricValue object_recall, object_precision, object_f1;
    MetricValue fppp;

    static std::vector<std::string> names() {
        return {"patient_recall", "patient_precision", "patient_f1", "object_recall",
                "object_precision", "object_f1", "fppp"};
    }
    std::vector<MetricValue> values() const {
        return {patient_recall, patient_precision, patient_f1, object_recall, object_precision, object_f1, fppp};
    }
};

RateColumns rates_of(std::span<const CohortRow> rows) {
    RateColumns out;
    const auto detections = detections_of(rows);
    const DetectionRates patient = detection_rates(detections);
    out.patient_recall = patient.recall;
    out.patient_precision = patient.precision;
    out.patient_f1 = patient.f1;
    const ObjectRates object = object_rates(rows);
    out.object_recall = object.recall;
    out.object_precision = object.precision;
    out.object_f1 = object.f1;
    out.fppp = object.fppp;
    return out;
}

void write_patient_scores(const std::filesystem::path& path, std::span<const CohortRow> rows) {
    csv::Writer out(path.string());
    std::vector<std::string> header = {"patient_id", "fold", "tumor_type", "threshold", "tp", "tn", "fp", "fn", "x"};
    for (const auto name : VoxelMetricSet::names) header.emplace_back(name);
    header.insert(header.end(), {"hd95", "mhd", "assd", "status", "patient_dice", "matched_objects",
                                 "unmatched_gt_objects", "unmatched_pred_objects", "object_recall",
                                 "object_precision", "object_f1", "fppp", "oassd", "gt_ml", "pred_ml"});
    out.row(header);
    const std::vector<RowMetric> object_columns = {row_metric("object_recall"), row_metric("object_precision"),
                                                   row_metric("object_f1"), row_metric("fppp")};
    for (const CohortRow& row : rows) {
        std::vector<std::string> cells = {row.patient_id,
                                          std::to_string(row.fold),
                                          to_string(row.tumor_type),
                                          threshold_cell(row.threshold),
                                          csv::count(row.counts.tp),
                                          csv::count(row.counts.tn),
                                          csv::count(row.counts.fp),
                                          csv::count(row.counts.fn),
                                          csv::count(row.counts.x)};
        for (const MetricValue& v : row.voxel.values()) cells.push_back(csv::metric(v));
        cells.push_back(csv::metric(row.distance.hd95));
        cells.push_back(csv::metric(row.distance.mhd));
        cells.push_back(csv::metric(row.distance.assd));
        cells.push_back(to_string(row.detection.status));
        cells.push_back(csv::metric(row.detection.patient_dice));
        cells.push_back(csv::count(row.object.matched));
        cells.push_back(csv::count(row.object.unmatched_gt));
        cells.push_back(csv::count(row.object.unmatched_pred));
        for (const RowMetric& metric : object_columns) cells.push_back(csv::metric(metric(row)));
        cells.push_back(csv::metric(row.object.oassd));
        cells.push_back(csv::metric(row.gt_ml));
        cells.push_back(csv::metric(row.pred_ml));
        out.row(cells);
    }
}

void write_foldwise(const std::filesystem::path& path, std::span<const CohortRow> rows,
                    const std::optional<double>& threshold) {
    csv::Writer out(path.string());
    std::vector<std::string> header = {"fold", "threshold", "n_patients", "dice_mean", "dice_std",
                                       "dice_tp_mean", "dice_tp_std", "dice_tp_n"};
    for (const auto& name : RateColumns::names()) header.push_back(name);
    out.row(header);

    const auto emit = [&](const std::string& label, std::span<const CohortRow> subset) {
        std::vector<std::string> cells = {label, threshold_cell(threshold), csv::count(subset.size())};
        const MetricSummary dice = pooled_metric(subset, row_metric("dice"));
        if (dice.estimate) {
            cells.push_back(csv::metric(dice.estimate->mean));
            cells.push_back(csv::metric(dice.estimate->std));
        } else {
            cells.insert(cells.end(), {csv::kMissing, csv::kMissing});
        }
        push_estimate(cells, dice_tp(subset));
        for (const MetricValue& v : rates_of(subset).values()) cells.push_back(csv::metric(v));
        out.row(cells);
    };
    for (const auto& [fold, subset] : by_fold(rows)) emit(std::to_string(fold), subset);
    emit("pooled", rows);
}

void write_cohort(const std::filesystem::path& path, std::span<const CohortRow> rows,
                  const std::optional<double>& threshold) {
    csv::Writer out(path.string());
    const auto metrics = pooled_metric_names();
    std::vector<std::string> header = {"group", "threshold", "n_patients"};
    for (const auto& m : metrics) {
        header.insert(header.end(), {m + "_mean", m + "_std", m + "_n"});
    }
    header.insert(header.end(), {"dice_tp_mean", "dice_tp_std", "dice_tp_n"});
    for (const auto& name : RateColumns::names()) {
        header.insert(header.end(), {name + "_mean", name + "_std", name + "_n"});
    }
    header.push_back("vc");
    out.row(header);

    const auto emit = [&](const std::string& label, std::span<const CohortRow> subset) {
        std::vector<std::string> cells = {label, threshold_cell(threshold), csv::count(subset.size())};
        for (const auto& m : metrics) push_estimate(cells, pooled_metric(subset, row_metric(m)).estimate);
        push_estimate(cells, dice_tp(subset));

        // Detection rates are cohort-level per fold; spread is across folds.
        std::vector<std::vector<double>> per_fold(RateColumns::names().size());
        for (const auto& [fold, fold_rows] : by_fold(subset)) {
            const auto values = rates_of(fold_rows).values();
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (values[i]) per_fold[i].push_back(*values[i]);
            }
        }
        for (const auto& values : per_fold) {
            if (values.empty()) {
                cells.insert(cells.end(), {csv::kMissing, csv::kMissing, "0"});
            } else {
                const FoldStat s = fold_stat(values);
                cells.insert(cells.end(), {csv::metric(s.mean), csv::metric(s.std), csv::count(s.n)});
            }
        }

        std::vector<std::pair<double, double>> volumes;
        for (const CohortRow& row : subset) volumes.emplace_back(row.gt_ml, row.pred_ml);
        MetricValue vc;
        try {
            vc = volume_correlation(volumes);
        } catch (const Error&) {
        }
        cells.push_back(csv::metric(vc));
        out.row(cells);
    };

    emit("all", rows);
    std::map<std::string, std::vector<CohortRow>> groups;
    for (const CohortRow& row : rows) groups[to_string(row.tumor_type)].push_back(row);
    for (const auto& [label, subset] : groups) emit(label, subset);
}

void write_correlation(const RunConfig& config, std::span<const CohortRow> rows) {
    std::vector<MetricColumn> columns;
    for (const auto& name : config.metrics) {
        const RowMetric metric = row_metric(name);
        MetricColumn column{name, {}};
        for (const CohortRow& row : rows) column.values.push_back(metric(row));
        columns.push_back(std::move(column));
    }
    const CorrelationMatrix m = metrics_correlation(columns, config.correlation);

    csv::Writer r_out((config.output_dir / "correlation_matrix.csv").string());
    csv::Writer n_out((config.output_dir / "correlation_counts.csv").string());
    std::vector<std::string> header = {"metric"};
    header.insert(header.end(), m.names.begin(), m.names.end());
    r_out.row(header);
    n_out.row(header);
    for (std::size_t i = 0; i < m.names.size(); ++i) {
        std::vector<std::string> r_cells = {m.names[i]};
        std::vector<std::string> n_cells = {m.names[i]};
        for (std::size_t j = 0; j < m.names.size(); ++j) {
            r_cells.push_back(csv::metric(m.r[i][j]));
            n_cells.push_back(csv::count(m.n[i][j]));
        }
        r_out.row(r_cells);
        n_out.row(n_cells);
    }
}

void write_volume_bins(const RunConfig& config, std::span<const CohortRow> rows) {
    csv::Writer out((config.output_dir / "volume_bins.csv").string());
    out.row({"bin", "volume_min_ml", "volume_max_ml", "count", "dice_min", "dice_q1", "dice_median", "dice_q3",
             "dice_max", "outliers"});
    std::vector<VolumeSample> samples;
    for (const CohortRow& row : rows) {
        if (row.voxel.dice) samples.push_back({row.patient_id, row.gt_ml, *row.voxel.dice});
    }
    if (samples.empty()) return;
    const std::size_t n_bins = std::min(config.volume_bins, samples.size());
    const auto bins = volume_binned_summary(std::move(samples), n_bins, config.binning);
    for (std::size_t b = 0; b < bins.size(); ++b) {
        const VolumeBin& bin = bins[b];
        std::vector<std::string> cells = {std::to_string(b), csv::metric(bin.volume_min),
                                          csv::metric(bin.volume_max), csv::count(bin.count)};
        if (bin.dice) {
            for (double v : {bin.dice->min, bin.dice->q1, bin.dice->median, bin.dice->q3, bin.dice->max}) {
                cells.push_back(csv::metric(v));
            }
        } else {
            cells.insert(cells.end(), 5, csv::kMissing);
        }
        std::string outliers;
        for (const auto& id : bin.outliers) outliers += (outliers.empty() ? "" : ";") + id;
        cells.push_back(outliers);
        out.row(cells);
    }
}

void write_errors(const std::filesystem::path& path, std::vector<CaseFailure> failures) {
    std::sort(failures.begin(), failures.end(),
              [](const CaseFailure& a, const CaseFailure& b) { return a.patient_id < b.patient_id; });
    csv::Writer out(path.string());
    out.row({"patient_id", "error", "message"});
    for (const auto& f : failures) out.row({f.patient_id, f.error, f.message});
}

}  // namespace

std::vector<CohortRow> summary_rows(std::span<const CohortRow> rows, std::optional<double>& threshold) {
    threshold = best_threshold(rows);
    std::vector<CohortRow> out;
    for (const CohortRow& row : rows) {
        if (!row.threshold || row.threshold == threshold) out.push_back(row);
    }
    return out;
}

void write_reports(const RunConfig& config, std::vector<CohortRow> rows) {
    std::filesystem::create_directories(config.output_dir);
    std::sort(rows.begin(), rows.end(), row_order);
    write_patient_scores(config.output_dir / "patient_scores.csv", rows);
    if (rows.empty()) return;

    std::optional<double> threshold;
    const auto summary = summary_rows(rows, threshold);
    write_foldwise(config.output_dir / "foldwise_summary.csv", summary, threshold);
    write_cohort(config.output_dir / "cohort_summary.csv", summary, threshold);
    write_correlation(config, summary);
    write_volume_bins(config, summary);
}

RunSummary run(const RunConfig& config) {
    config.validate();
    const std::vector<PatientCase> cases = load_manifest(config.manifest);
    std::filesystem::create_directories(config.output_dir);

    std::vector<std::vector<CohortRow>> results(cases.size());
    std::vector<CaseFailure> failures;
    std::mutex failures_mutex;
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            const PatientCase& c = cases[i];
            try {
                results[i] = threshold_sweep(c, config.thresholds, config.evaluation);
            } catch (const Error& e) {
                const std::lock_guard lock(failures_mutex);
                failures.push_back({c.patient_id, std::string(error_name(e.code())), e.what()});
            } catch (const std::exception& e) {
                const std::lock_guard lock(failures_mutex);
                failures.push_back({c.patient_id, "InternalError", e.what()});
            }
        }
    };
    const std::size_t n_threads = std::min(config.workers, cases.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& thread : pool) thread.join();

    RunSummary summary;
    summary.failed = failures.size();
    summary.succeeded = cases.size() - failures.size();
    write_errors(config.output_dir / "errors.csv", std::move(failures));

    std::vector<CohortRow> rows;
    for (auto& case_rows : results) {
        for (auto& row : case_rows) rows.push_back(std::move(row));
    }
    if (summary.succeeded == 0) {
        summary.exit_code = kExitNoSuccessfulCases;
        write_reports(config, {});
        return summary;
    }
    write_reports(config, rows);
    best_threshold(rows).swap(summary.selected_threshold);
    return summary;
}

ValidationReport validate(const RunConfig& config) {
    ValidationReport report;
    std::vector<PatientCase> cases;
    try {
        config.validate();
        cases = load_manifest(config.manifest);
    } catch (const Error& e) {
        report.config_error = true;
        report.diagnostics.push_back({"", e.code(), e.what()});
        return report;
    }
    for (const PatientCase& c : cases) {
        try {
            const NiftiHeader gt = read_nifti_header(c.gt_path);
            const NiftiHeader pred = read_nifti_header(c.pred_path);
            check_geometry(gt.geometry, pred.geometry);
        } catch (const Error& e) {
            report.diagnostics.push_back({c.patient_id, e.code(), e.what()});
        }
    }
    return report;
}

}  // namespace segeval
