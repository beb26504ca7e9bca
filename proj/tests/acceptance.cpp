#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "segeval/cohort_stats.hpp"
#include "segeval/evaluation.hpp"
#include "segeval/instance_metrics.hpp"
#include "segeval/nifti.hpp"
#include "segeval/oracle.hpp"
#include "segeval/surface_metrics.hpp"
#include "segeval/voxel_metrics.hpp"
#include "support.hpp"

using namespace segeval;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

Outcome exhaustive_confusion_oracle() {
    const auto start = Clock::now();
    std::size_t tuples = 0, mismatches = 0;
    double worst = 0.0;
    std::vector<std::uint8_t> gt, pred;
    for (std::uint64_t x = 1; x <= 12; ++x)
        for (std::uint64_t tp = 0; tp <= x; ++tp)
            for (std::uint64_t fp = 0; tp + fp <= x; ++fp)
                for (std::uint64_t fn = 0; tp + fp + fn <= x; ++fn) {
                    const auto c = ConfusionCounts::from(tp, x - tp - fp - fn, fp, fn);
                    oracle::realise_counts(c, gt, pred);
                    const auto reference = oracle::voxel_metrics(gt, pred);
                    const auto values = voxel_metric_set(c).values();
                    for (std::size_t i = 0; i < kVoxelMetricCount; ++i) {
                        if (values[i].has_value() != reference[i].has_value()) {
                            ++mismatches;
                            continue;
                        }
                        if (!values[i]) continue;
                        if (std::isinf(*values[i]) || std::isinf(*reference[i])) {
                            if (*values[i] != *reference[i]) ++mismatches;
                            continue;
                        }
                        const double d = std::abs(*values[i] - *reference[i]);
                        worst = std::max(worst, d);
                        if (d > 1e-9) ++mismatches;
                    }
                    ++tuples;
                }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < 5.0,
            fmt("%zu tuples x 18 metrics, max deviation %.3g, %zu mismatches, %.2f s", tuples, worst, mismatches,
                elapsed)};
}

Outcome dice_jaccard_identity() {
    std::mt19937_64 rng(20221);
    std::uniform_int_distribution<std::uint64_t> d(0, 1000000);
    double worst = 0.0;
    std::size_t checked = 0;
    while (checked < 10000) {
        const auto c = ConfusionCounts::from(d(rng), d(rng), d(rng), d(rng));
        const OverlapMetrics m = overlap_metrics(c);
        if (!m.jaccard) continue;
        worst = std::max(worst, std::abs(*m.dice - 2.0 * *m.jaccard / (1.0 + *m.jaccard)));
        ++checked;
    }
    return {worst <= 1e-12, fmt("%zu tuples, max |Dice - 2J/(1+J)| = %.3g", checked, worst)};
}

Outcome surface_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(6061);
    std::uniform_int_distribution<std::size_t> side(1, 6);
    std::uniform_real_distribution<double> spacing(0.25, 4.0);
    std::uniform_real_distribution<double> density(0.05, 0.9);
    std::size_t pairs = 0, mismatches = 0;
    while (pairs < 1000) {
        const Geometry g = test::grid(side(rng), side(rng), side(rng), {spacing(rng), spacing(rng), spacing(rng)});
        const BinaryMask a = test::random_mask(g, density(rng), rng);
        const BinaryMask b = test::random_mask(g, density(rng), rng);
        if (a.is_empty() || b.is_empty()) continue;
        if (hd95(a, b) != oracle::hd95(a, b)) ++mismatches;
        if (assd(a, b) != oracle::assd(a, b)) ++mismatches;
        ++pairs;
    }
    const double elapsed = seconds_since(start);
    return {mismatches == 0 && elapsed < 30.0,
            fmt("%zu pairs, %zu inexact results, %.2f s", pairs, mismatches, elapsed)};
}

Outcome component_oracle() {
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<std::size_t> side(1, 4);
    std::size_t label_mismatch = 0, not_idempotent = 0;
    for (int n = 0; n < 10000; ++n) {
        const BinaryMask m = test::random_mask(test::grid(side(rng), side(rng), side(rng)), 0.5, rng);
        for (auto c : {Connectivity::six, Connectivity::twenty_six}) {
            const ComponentLabeling l = connected_components(m, c);
            if (l.labels != oracle::flood_fill_labels(m, c)) ++label_mismatch;
            for (std::size_t t : {2, 3, 5}) {
                const ComponentLabeling once = filter_small(l, t);
                if (filter_small(once, t).labels != once.labels) ++not_idempotent;
            }
        }
    }
    return {label_mismatch == 0 && not_idempotent == 0,
            fmt("10000 masks x {6,26}: %zu labeling mismatches, %zu non-idempotent filters", label_mismatch,
                not_idempotent)};
}

Outcome metric_relationships() {
    std::mt19937_64 rng(200);
    std::uniform_real_distribution<double> radius(4.0, 10.0);
    std::normal_distribution<double> jitter(0.0, 1.5);
    std::uniform_real_distribution<double> scale(0.6, 1.3);
    const Geometry g = test::grid(32, 32, 32, {1.0, 1.0, 1.5});
    MetricColumn dice{"dice", {}}, ari{"ari", {}}, fpr{"fpr", {}}, tnr{"tnr", {}};
    for (int patient = 0; patient < 200; ++patient) {
        const double r = radius(rng);
        const BinaryMask gt = test::sphere(g, {15.5, 15.5, 15.5}, r);
        const BinaryMask pred =
            test::sphere(g, {15.5 + jitter(rng), 15.5 + jitter(rng), 15.5 + jitter(rng)}, r * scale(rng));
        const VoxelMetricSet m = voxel_metric_set(gt, pred);
        dice.values.push_back(m.dice);
        ari.values.push_back(m.ari);
        fpr.values.push_back(m.fpr);
        tnr.values.push_back(m.tnr);
    }
    const std::vector<MetricColumn> columns{dice, ari, fpr, tnr};
    const CorrelationMatrix c = metrics_correlation(columns);
    const double dice_ari = c.r[0][1].value_or(NAN);
    const double fpr_tnr = c.r[2][3].value_or(NAN);
    return {dice_ari > 0.95 && fpr_tnr == -1.0,
            fmt("200 patients: corr(dice, ari) = %.6f, corr(fpr, tnr) = %.17g", dice_ari, fpr_tnr)};
}

Outcome pooled_estimate_check() {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t inexact = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<FoldStat> folds;
        double sum = 0.0;
        for (int f = 0; f < 5; ++f) {
            folds.push_back({u(rng), u(rng) * 0.2, 12});
            sum += folds.back().mean;
        }
        if (pooled_estimates(folds).mean != sum / 5.0) ++inexact;
    }
    const std::vector<FoldStat> worked{{0.0, 0.0, 5}, {1.0, 0.0, 5}};
    const PooledEstimate p = pooled_estimates(worked);
    const double mean_err = std::abs(p.mean - 0.5);
    const double var_err = std::abs(p.std * p.std - 10.0 * 0.25 / 9.0);
    return {inexact == 0 && mean_err <= 1e-12 && var_err <= 1e-12,
            fmt("equal folds: %zu/1000 inexact; two-fold example mean err %.3g, variance err %.3g", inexact,
                mean_err, var_err)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome cli_determinism() {
    test::TempDir dir("acceptance");
    std::mt19937_64 rng(50);
    std::uniform_real_distribution<double> radius(3.0, 7.0);
    std::normal_distribution<double> jitter(0.0, 1.0);
    const Geometry g = test::grid(24, 24, 20, {0.9, 0.9, 1.2});
    std::ofstream manifest(dir.path() / "manifest.csv");
    manifest << "patient_id,fold,gt_path,pred_path,tumor_type\n";
    const char* types[] = {"glioblastoma", "lgg", "meningioma", "metastasis"};
    for (int i = 0; i < 50; ++i) {
        const std::string id = fmt("case%02d", i);
        const double r = radius(rng);
        const BinaryMask gt = test::sphere(g, {12, 12, 10}, r);
        save_nifti(gt.to_grid(), dir.file(id + "_gt.nii.gz"), NiftiDatatype::uint8);
        const std::array<double, 3> centre{12 + jitter(rng), 12 + jitter(rng), 10 + jitter(rng)};
        if (i % 2 == 0) {
            save_nifti(test::sphere(g, centre, r + jitter(rng)).to_grid(), dir.file(id + "_pred.nii.gz"),
                       NiftiDatatype::uint8);
        } else {
            std::vector<double> p(g.voxel_count());
            for (std::size_t k = 0; k < g.dims[2]; ++k)
                for (std::size_t j = 0; j < g.dims[1]; ++j)
                    for (std::size_t x = 0; x < g.dims[0]; ++x) {
                        const double d = std::hypot(x - centre[0], j - centre[1], k - centre[2]);
                        p[g.index(x, j, k)] = static_cast<float>(1.0 / (1.0 + std::exp(d - r)));
                    }
            save_nifti(VoxelGrid(g, p, DType::probability), dir.file(id + "_pred.nii.gz"), NiftiDatatype::float32);
        }
        manifest << id << ',' << i % 5 << ',' << id << "_gt.nii.gz," << id << "_pred.nii.gz," << types[i % 4]
                 << '\n';
    }
    manifest.close();

    int codes[2] = {-1, -1};
    const int workers[2] = {1, 8};
    for (int w = 0; w < 2; ++w) {
        const auto out = dir.path() / fmt("out%d", workers[w]);
        std::ofstream config(dir.path() / fmt("run%d.cfg", workers[w]));
        config << "manifest = manifest.csv\noutput_dir = " << out.filename().string()
               << "\nmin_component_voxels = 10\nvolume_bins = 5\n";
        config.close();
        const std::string cmd = fmt("SEGEVAL_WORKERS=%d ", workers[w]) + std::string("'") + SEGEVAL_CLI_PATH +
                                "' run --config '" + (dir.path() / fmt("run%d.cfg", workers[w])).string() +
                                "' > /dev/null";
        codes[w] = std::system(cmd.c_str());
    }
    std::size_t files = 0, differing = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir.path() / "out1")) {
        ++files;
        const auto other = dir.path() / "out8" / entry.path().filename();
        if (!std::filesystem::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
    }
    const std::size_t score_lines = [&] {
        std::ifstream in(dir.path() / "out1" / "patient_scores.csv");
        std::size_t n = 0;
        for (std::string line; std::getline(in, line);) ++n;
        return n;
    }();
    return {codes[0] == 0 && codes[1] == 0 && files == 7 && differing == 0 && score_lines == 1 + 25 + 25 * 10,
            fmt("50 cases, exit codes %d/%d, %zu CSVs compared, %zu differ, %zu score lines", codes[0], codes[1],
                files, differing, score_lines)};
}

Outcome performance() {
    const Geometry g = test::grid(256, 256, 256);
    const BinaryMask gt = test::sphere(g, {127.5, 127.5, 127.5}, 98.0);
    const BinaryMask pred = test::sphere(g, {129.0, 126.0, 128.5}, 96.0);

    auto start = Clock::now();
    const VoxelMetricSet m = voxel_metric_set(gt, pred);
    const double voxel_time = seconds_since(start);

    start = Clock::now();
    const SurfacePointSet a = extract_border(gt);
    const SurfacePointSet b = extract_border(pred);
    const MetricValue h = hd95(a, b);
    const MetricValue s = assd(a, b);
    const double surface_time = seconds_since(start);
    return {voxel_time < 1.0 && surface_time < 5.0 && m.dice && h && s,
            fmt("256^3: voxel metrics %.3f s; %zu + %zu border voxels, hd95 %.3f mm, assd %.3f mm in %.3f s",
                voxel_time, a.size(), b.size(), h.value_or(NAN), s.value_or(NAN), surface_time)};
}

Outcome threshold_sweep_check() {
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.15);
    const Geometry g = test::grid(20, 20, 20);
    const auto thresholds = default_thresholds();
    EvaluationOptions options;
    options.min_component_voxels = 5;
    std::size_t cases = 0, bad_cardinality = 0, increases = 0;
    for (int i = 0; i < 20; ++i) {
        const double r = 3.0 + 5.0 * u(rng);
        const BinaryMask gt = test::sphere(g, {10, 10, 10}, r);
        std::vector<double> p(g.voxel_count());
        for (std::size_t k = 0; k < 20; ++k)
            for (std::size_t j = 0; j < 20; ++j)
                for (std::size_t x = 0; x < 20; ++x) {
                    const double d = std::hypot(x - 10.0, j - 10.0, k - 10.0);
                    p[g.index(x, j, k)] = std::clamp(1.0 / (1.0 + std::exp(d - r)) + noise(rng), 0.0, 1.0);
                }
        const PatientCase meta{"sweep" + std::to_string(i), "", "", 0, TumorType::other};
        const auto rows = threshold_sweep(meta, gt, VoxelGrid(g, p, DType::probability), thresholds, options);
        ++cases;
        if (rows.size() != 10) ++bad_cardinality;
        for (std::size_t t = 1; t < rows.size(); ++t) {
            if (rows[t].pred_ml > rows[t - 1].pred_ml) ++increases;
        }
    }
    return {bad_cardinality == 0 && increases == 0,
            fmt("%zu probability maps: %zu without ten rows, %zu volume increases", cases, bad_cardinality,
                increases)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"exhaustive confusion oracle", exhaustive_confusion_oracle},
        {"dice-jaccard identity", dice_jaccard_identity},
        {"surface oracle", surface_oracle},
        {"component oracle", component_oracle},
        {"metric relationships", metric_relationships},
        {"pooled estimates", pooled_estimate_check},
        {"worker determinism", cli_determinism},
        {"performance", performance},
        {"threshold sweep", threshold_sweep_check},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s %zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
