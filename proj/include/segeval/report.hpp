#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "segeval/cohort_stats.hpp"
#include "segeval/evaluation.hpp"

namespace segeval {

struct RunConfig {
    std::filesystem::path manifest;
    std::filesystem::path output_dir = "segeval_out";
    std::vector<double> thresholds = default_thresholds();
    EvaluationOptions evaluation;
    std::size_t workers = 1;
    // Columns of the correlation matrix.
    std::vector<std::string> metrics = default_correlation_metrics();
    CorrelationMethod correlation = CorrelationMethod::pearson;
    BinningMode binning = BinningMode::equal_count;
    std::size_t volume_bins = kDefaultVolumeBins;

    static std::vector<std::string> default_correlation_metrics();

    // Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// Parses `key = value` lines ('#' starts a comment). Relative paths are
/// resolved against base_dir.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// SEGEVAL_WORKERS, when set, overrides the worker count.
void apply_environment(RunConfig& config);

/// Reads a CSV with header patient_id,fold,gt_path,pred_path,tumor_type.
/// Paths are resolved relative to the manifest's directory.
std::vector<PatientCase> load_manifest(const std::filesystem::path& path);

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNoSuccessfulCases = 2;

struct RunSummary {
    int exit_code = kExitSuccess;
    std::size_t succeeded = 0;
    std::size_t failed = 0;
    std::optional<double> selected_threshold;
};

/// Evaluates every manifest case on a worker pool and writes
/// patient_scores.csv, errors.csv, foldwise_summary.csv, cohort_summary.csv,
/// correlation_matrix.csv, correlation_counts.csv and volume_bins.csv.
/// Output is independent of the worker count.
RunSummary run(const RunConfig& config);

struct Diagnostic {
    std::string patient_id;
    ErrorCode code = ErrorCode::io_error;
    std::string message;
};

struct ValidationReport {
    std::vector<Diagnostic> diagnostics;
    bool config_error = false;
};

/// Header and geometry checks for every case, no metrics.
ValidationReport validate(const RunConfig& config);

/// Report writers, exposed for callers holding rows in memory.
void write_reports(const RunConfig& config, std::vector<CohortRow> rows);

/// Rows used for summaries: threshold-free rows as-is, thresholded rows at
/// the best cohort threshold.
std::vector<CohortRow> summary_rows(std::span<const CohortRow> rows, std::optional<double>& threshold);

}  // namespace segeval
