#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "segeval/cohort_stats.hpp"
#include "segeval/error.hpp"
#include "segeval/statistics.hpp"

using namespace segeval;
using doctest::Approx;

namespace {

CohortRow row(const std::string& id, int fold, double dice, DetectionStatus status = DetectionStatus::true_positive) {
    CohortRow r;
    r.patient_id = id;
    r.fold = fold;
    r.voxel.dice = dice;
    r.detection.status = status;
    r.detection.patient_dice = dice;
    return r;
}

}  // namespace

TEST_CASE("pooled estimates") {
    const std::vector<FoldStat> same{{0.8, 0.1, 10}, {0.8, 0.1, 10}};
    const PooledEstimate p = pooled_estimates(same);
    CHECK(p.mean == Approx(0.8).epsilon(1e-15));
    CHECK(p.std == Approx(0.1 * std::sqrt(18.0 / 19.0)).epsilon(1e-12));
    CHECK(p.std == Approx(0.0973).epsilon(1e-3));
    CHECK(p.n == 20);

    const std::vector<FoldStat> one{{0.37, 0.21, 7}};
    const PooledEstimate q = pooled_estimates(one);
    CHECK(q.mean == 0.37);
    CHECK(q.std == 0.21);
    CHECK(q.n == 7);

    const std::vector<FoldStat> split{{0.0, 0.0, 5}, {1.0, 0.0, 5}};
    const PooledEstimate r = pooled_estimates(split);
    CHECK(std::abs(r.mean - 0.5) <= 1e-12);
    CHECK(std::abs(r.std * r.std - 10.0 * 0.25 / 9.0) <= 1e-12);

    CHECK_THROWS_AS(pooled_estimates(std::vector<FoldStat>{}), Error);
}

TEST_CASE("equal fold sizes pool to the mean of means") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<FoldStat> folds;
        double sum = 0.0;
        for (int f = 0; f < 5; ++f) {
            folds.push_back({u(rng), u(rng), 8});
            sum += folds.back().mean;
        }
        CHECK(std::abs(pooled_estimates(folds).mean - sum / 5.0) <= 1e-15);
    }
}

TEST_CASE("pooled metric excludes undefined values") {
    std::vector<CohortRow> rows{row("a", 0, 0.5), row("b", 0, 0.7), row("c", 1, 0.9)};
    rows[1].voxel.jaccard = std::nullopt;
    rows[0].voxel.jaccard = 0.2;
    rows[2].voxel.jaccard = 0.4;
    const MetricSummary s = pooled_metric(rows, row_metric("jaccard"));
    REQUIRE(s.estimate);
    CHECK(s.excluded == 1);
    CHECK(s.estimate->n == 2);
    CHECK(s.estimate->mean == Approx(0.3));
}

TEST_CASE("detection rates") {
    std::vector<PatientDetection> all(10, {DetectionStatus::true_positive, 0.8});
    DetectionRates r = detection_rates(all);
    CHECK(r.recall == 1.0);
    CHECK(*r.precision == 1.0);
    CHECK(*r.f1 == 1.0);

    all.back().status = DetectionStatus::false_negative_empty;
    r = detection_rates(all);
    CHECK(r.recall == Approx(0.9));
    CHECK(*r.precision == 1.0);

    all.back().status = DetectionStatus::false_negative_with_fp;
    r = detection_rates(all);
    CHECK(r.recall == Approx(0.9));
    CHECK(*r.precision == Approx(0.9));

    const std::vector<PatientDetection> none(3, {DetectionStatus::false_negative_empty, 0.0});
    r = detection_rates(none);
    CHECK(r.recall == 0.0);
    CHECK_FALSE(r.precision.has_value());
}

TEST_CASE("dice over detected patients") {
    const std::vector<CohortRow> all{row("a", 0, 0.8), row("b", 0, 0.6)};
    CHECK(dice_tp(all)->mean == Approx(pooled_metric(all, row_metric("dice")).estimate->mean));

    const std::vector<CohortRow> mixed{row("a", 0, 0.8), row("b", 0, 0.0, DetectionStatus::false_negative_empty)};
    CHECK(pooled_metric(mixed, row_metric("dice")).estimate->mean == Approx(0.4));
    CHECK(dice_tp(mixed)->mean == Approx(0.8));

    const std::vector<CohortRow> missed{row("a", 0, 0.0, DetectionStatus::false_negative_empty)};
    CHECK_FALSE(dice_tp(missed).has_value());
}

TEST_CASE("volume correlation") {
    std::vector<std::pair<double, double>> same, doubled, reversed;
    for (int i = 1; i <= 10; ++i) {
        same.emplace_back(i * 1.5, i * 1.5);
        doubled.emplace_back(i * 1.5, i * 3.0);
        reversed.emplace_back(i * 1.5, 20.0 - i);
    }
    CHECK(volume_correlation(same) == Approx(1.0).epsilon(1e-15));
    CHECK(volume_correlation(doubled) == Approx(1.0).epsilon(1e-15));
    CHECK(volume_correlation(reversed) < 0.0);
    CHECK_THROWS_AS(volume_correlation(std::vector<std::pair<double, double>>{{1, 2}}), Error);
    CHECK_THROWS_AS(volume_correlation(std::vector<std::pair<double, double>>{{1, 2}, {1, 3}}), Error);
}

TEST_CASE("volume bins") {
    std::vector<VolumeSample> twenty;
    for (int i = 0; i < 20; ++i) twenty.push_back({"p" + std::to_string(i), static_cast<double>(i), 0.5});
    for (const auto& bin : volume_binned_summary(twenty, 10)) CHECK(bin.count == 2);

    auto twenty_one = twenty;
    twenty_one.push_back({"p20", 20.0, 0.5});
    const auto bins = volume_binned_summary(twenty_one, 10);
    CHECK(bins.front().count == 3);
    for (std::size_t b = 1; b < bins.size(); ++b) CHECK(bins[b].count == 2);

    std::vector<VolumeSample> ties;
    for (const char* id : {"d", "b", "a", "c"}) ties.push_back({id, 2.0, 0.1});
    const auto tie_bins = volume_binned_summary(ties, 2);
    CHECK(tie_bins[0].members == std::vector<std::string>{"a", "b"});
    CHECK(tie_bins[1].members == std::vector<std::string>{"c", "d"});

    CHECK_THROWS_AS(volume_binned_summary(ties, 5), Error);
}

TEST_CASE("binning is a partition") {
    std::mt19937_64 rng(4);
    std::lognormal_distribution<double> vol(1.0, 1.0);
    std::uniform_real_distribution<double> dice(0.0, 1.0);
    std::vector<VolumeSample> samples;
    for (int i = 0; i < 57; ++i) samples.push_back({"p" + std::to_string(i), vol(rng), dice(rng)});
    for (auto mode : {BinningMode::equal_count, BinningMode::equal_width}) {
        const auto bins = volume_binned_summary(samples, 6, mode);
        std::size_t total = 0;
        for (std::size_t b = 0; b < bins.size(); ++b) {
            total += bins[b].count;
            CHECK(bins[b].members.size() == bins[b].count);
            if (b > 0) CHECK(bins[b].volume_min >= bins[b - 1].volume_max);
        }
        CHECK(total == samples.size());
    }
}

TEST_CASE("outliers lie beyond 1.5 IQR") {
    std::vector<VolumeSample> samples;
    for (int i = 0; i < 9; ++i) samples.push_back({"p" + std::to_string(i), 1.0 + i, 0.8 + 0.01 * i});
    samples.push_back({"low", 11.0, 0.05});
    const auto bins = volume_binned_summary(samples, 1);
    CHECK(bins[0].outliers == std::vector<std::string>{"low"});
    const FiveNumberSummary f = five_number_summary({1, 2, 3, 4, 5});
    CHECK(f.median == 3.0);
    CHECK(f.q1 == 2.0);
    CHECK(f.q3 == 4.0);
}

TEST_CASE("metric correlation matrix") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MetricColumn dice{"dice", {}}, complement{"one_minus_dice", {}}, other{"other", {}}, sparse{"sparse", {}};
    for (int i = 0; i < 40; ++i) {
        const double d = u(rng);
        dice.values.push_back(d);
        complement.values.push_back(1.0 - d);
        other.values.push_back(u(rng));
        sparse.values.push_back(i < 2 ? MetricValue(u(rng)) : std::nullopt);
    }
    const std::vector<MetricColumn> columns{dice, complement, other, sparse};
    for (auto method : {CorrelationMethod::pearson, CorrelationMethod::spearman}) {
        const CorrelationMatrix m = metrics_correlation(columns, method);
        CHECK(*m.r[0][0] == 1.0);
        CHECK(*m.r[0][1] == -1.0);
        CHECK_FALSE(m.r[0][3].has_value());
        CHECK(m.n[0][3] == 2);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                REQUIRE(m.r[i][j].has_value());
                CHECK(std::abs(*m.r[i][j] - *m.r[j][i]) <= 1e-12);
                CHECK(std::abs(*m.r[i][j]) <= 1.0);
            }
    }
}

TEST_CASE("fpr and tnr are perfectly anti-correlated") {
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<std::uint64_t> d(1, 5000);
    MetricColumn fpr{"fpr", {}}, tnr{"tnr", {}};
    for (int i = 0; i < 60; ++i) {
        const VoxelMetricSet m = voxel_metric_set(ConfusionCounts::from(d(rng), d(rng) * 50, d(rng), d(rng)));
        fpr.values.push_back(m.fpr);
        tnr.values.push_back(m.tnr);
    }
    const std::vector<MetricColumn> columns{fpr, tnr};
    CHECK(*metrics_correlation(columns).r[0][1] == -1.0);
}

TEST_CASE("best threshold prefers the lower value on ties") {
    std::vector<CohortRow> rows;
    for (double t : {0.3, 0.5, 0.7}) {
        CohortRow a = row("a", 0, t == 0.7 ? 0.6 : 0.9);
        a.threshold = t;
        rows.push_back(a);
    }
    CHECK(best_threshold(rows) == 0.3);
    CHECK_FALSE(best_threshold(std::vector<CohortRow>{row("b", 0, 0.5)}).has_value());
}

TEST_CASE("statistics helpers") {
    const std::vector<double> x{1, 2, 3, 4};
    CHECK(mean(x) == 2.5);
    CHECK(sample_std(x) == Approx(std::sqrt(5.0 / 3.0)));
    CHECK(percentile_sorted(x, 0.5) == 2.5);
    CHECK(average_ranks(std::vector<double>{3, 1, 3}) == std::vector<double>{2.5, 1.0, 2.5});
    CHECK_FALSE(pearson(x, std::vector<double>{1, 1, 1, 1}).has_value());
}

TEST_CASE("row metrics are named") {
    for (const auto& name : row_metric_names()) CHECK_NOTHROW(row_metric(name));
    CHECK_THROWS_AS(row_metric("unknown"), Error);
}
