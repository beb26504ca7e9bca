#include <cmath>

#include "doctest.h"
#include "segeval/oracle.hpp"
#include "segeval/voxel_metrics.hpp"
#include "support.hpp"

using namespace segeval;
using doctest::Approx;

namespace {

const ConfusionCounts kExample = ConfusionCounts::from(6, 54, 2, 2);

double v(const MetricValue& m) {
    REQUIRE(m.has_value());
    return *m;
}

}  // namespace

TEST_CASE("confusion counts from masks") {
    const Geometry g = test::grid(4, 4, 4);
    const BinaryMask cube = test::box(g, {0, 0, 0}, {2, 2, 2});
    CHECK(confusion_counts(cube, cube) == ConfusionCounts{8, 56, 0, 0, 64});

    // 8 ones each, 6 shared.
    std::vector<test::Voxel> a, b;
    for (std::size_t i = 0; i < 6; ++i) {
        a.push_back({i % 4, i / 4, 0});
        b.push_back({i % 4, i / 4, 0});
    }
    a.push_back({0, 0, 1});
    a.push_back({1, 0, 1});
    b.push_back({0, 0, 2});
    b.push_back({1, 0, 2});
    CHECK(confusion_counts(test::voxels(g, a), test::voxels(g, b)) == ConfusionCounts{6, 54, 2, 2, 64});

    const BinaryMask empty = BinaryMask::empty(g);
    CHECK(confusion_counts(empty, empty) == ConfusionCounts{0, 64, 0, 0, 64});
}

TEST_CASE("overlap metrics on the worked example") {
    const OverlapMetrics m = overlap_metrics(kExample);
    CHECK(v(m.dice) == Approx(0.75).epsilon(1e-15));
    CHECK(v(m.jaccard) == Approx(0.6).epsilon(1e-15));
    CHECK(v(m.iou) == v(m.jaccard));
    CHECK(v(m.tpr) == Approx(0.75));
    CHECK(v(m.ppv) == Approx(0.75));
    CHECK(v(m.tnr) == Approx(54.0 / 56.0).epsilon(1e-15));
    CHECK(v(m.gce) == Approx((2.0 * 14 / 8 + 2.0 * 110 / 56) / 64).epsilon(1e-14));
    CHECK(v(m.gce) == Approx(0.11607142857142858).epsilon(1e-14));
}

TEST_CASE("overlap metrics edge cases") {
    const OverlapMetrics same = overlap_metrics(ConfusionCounts::from(10, 20, 0, 0));
    CHECK(v(same.dice) == 1.0);
    CHECK(v(same.gce) == 0.0);

    const OverlapMetrics disjoint = overlap_metrics(ConfusionCounts::from(0, 48, 8, 8));
    CHECK(v(disjoint.dice) == 0.0);
    CHECK(v(disjoint.jaccard) == 0.0);

    const OverlapMetrics both_empty = overlap_metrics(ConfusionCounts::from(0, 64, 0, 0));
    CHECK(v(both_empty.dice) == 1.0);
    CHECK_FALSE(both_empty.jaccard.has_value());
    CHECK_FALSE(both_empty.tpr.has_value());
    CHECK_FALSE(both_empty.ppv.has_value());
}

TEST_CASE("volume metrics") {
    const VolumeMetrics equal = volume_metrics(kExample);
    CHECK(v(equal.vs) == 1.0);
    CHECK(v(equal.ravd) == 0.0);
    CHECK(v(volume_metrics(ConfusionCounts::from(6, 50, 6, 2)).ravd) == Approx(0.5).epsilon(1e-15));
    CHECK(v(volume_metrics(ConfusionCounts::from(0, 56, 0, 8)).ravd) == -1.0);
    CHECK_FALSE(volume_metrics(ConfusionCounts::from(0, 56, 8, 0)).ravd.has_value());
}

TEST_CASE("information metrics") {
    const InformationMetrics half = information_metrics(ConfusionCounts::from(32, 32, 0, 0));
    CHECK(v(half.h1) == Approx(1.0).epsilon(1e-15));
    CHECK(v(half.h2) == Approx(1.0).epsilon(1e-15));
    CHECK(v(half.h12) == Approx(1.0).epsilon(1e-15));
    CHECK(v(half.mi) == Approx(1.0).epsilon(1e-15));
    CHECK(v(half.nmi) == Approx(1.0).epsilon(1e-15));
    CHECK(v(half.voi) == 0.0);

    for (std::uint64_t tp : {1, 3, 17, 60}) {
        CHECK(v(information_metrics(ConfusionCounts::from(tp, 64 - tp, 0, 0)).voi) == 0.0);
    }

    // Full-precision values; the six-digit figures below are rounded.
    const InformationMetrics m = information_metrics(kExample);
    CHECK(v(m.h1) == Approx(0.5435644431995964).epsilon(1e-13));
    CHECK(v(m.h2) == Approx(0.5435644431995964).epsilon(1e-13));
    CHECK(v(m.h12) == Approx(0.8394734356069651).epsilon(1e-13));
    CHECK(v(m.mi) == Approx(0.24765545079222773).epsilon(1e-13));
    CHECK(v(m.nmi) == Approx(0.4556137802804899).epsilon(1e-13));
    CHECK(v(m.voi) == Approx(0.5918179848147374).epsilon(1e-13));
    CHECK(v(m.h12) == Approx(0.839465).epsilon(1e-4));
    CHECK(v(m.voi) == Approx(0.591802).epsilon(1e-4));
}

TEST_CASE("probabilistic metrics") {
    const ProbabilisticMetrics same = probabilistic_metrics(ConfusionCounts::from(5, 59, 0, 0));
    CHECK(v(same.cks) == Approx(1.0).epsilon(1e-15));
    CHECK(v(same.mcc) == Approx(1.0).epsilon(1e-15));
    CHECK(v(same.auc) == 1.0);
    CHECK(v(same.pbd) == 0.0);
    CHECK(v(same.ari) == Approx(1.0).epsilon(1e-15));

    const ProbabilisticMetrics m = probabilistic_metrics(kExample);
    CHECK(v(m.auc) == Approx(0.8571428571428572).epsilon(1e-14));
    CHECK(v(m.mcc) == Approx(320.0 / 448.0).epsilon(1e-14));
    CHECK(v(m.cks) == Approx(0.7142857142857143).epsilon(1e-14));
    CHECK(v(m.pbd) == Approx(4.0 / 12.0).epsilon(1e-14));
    CHECK(v(m.ari) == Approx(0.6556122448979592).epsilon(1e-14));

    const ProbabilisticMetrics disjoint = probabilistic_metrics(ConfusionCounts::from(0, 48, 8, 8));
    CHECK(std::isinf(v(disjoint.pbd)));
}

TEST_CASE("as-printed ARI variant matches its literal oracle") {
    for (const auto& c : {kExample, ConfusionCounts::from(3, 4, 1, 2), ConfusionCounts::from(10, 0, 5, 5)}) {
        const MetricValue production = adjusted_rand_index(c, AriVariant::as_printed);
        const MetricValue reference = oracle::ari_as_printed(c);
        REQUIRE(production.has_value() == reference.has_value());
        if (production) CHECK(*production == Approx(*reference).epsilon(1e-12));
    }
    const MetricValue printed_identity = adjusted_rand_index(ConfusionCounts::from(5, 59, 0, 0), AriVariant::as_printed);
    CHECK_FALSE((printed_identity && *printed_identity == Approx(1.0)));
}

TEST_CASE("Dice-Jaccard identity on random counts") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint64_t> d(0, 100000);
    for (int n = 0; n < 10000; ++n) {
        const auto c = ConfusionCounts::from(d(rng), d(rng), d(rng), d(rng));
        const VoxelMetricSet m = voxel_metric_set(c);
        if (!m.jaccard) continue;
        CHECK(std::abs(v(m.dice) - 2.0 * *m.jaccard / (1.0 + *m.jaccard)) <= 1e-12);
    }
}

TEST_CASE("symmetry and complement identities") {
    for (std::uint64_t x = 1; x <= 9; ++x) {
        for (std::uint64_t tp = 0; tp <= x; ++tp)
            for (std::uint64_t fp = 0; tp + fp <= x; ++fp)
                for (std::uint64_t fn = 0; tp + fp + fn <= x; ++fn) {
                    const auto c = ConfusionCounts::from(tp, x - tp - fp - fn, fp, fn);
                    const VoxelMetricSet a = voxel_metric_set(c);
                    const VoxelMetricSet b = voxel_metric_set(c.swapped());
                    for (const char* name : {"dice", "jaccard", "vs", "nmi", "voi", "gce", "ari", "mcc", "cks"}) {
                        const std::string metric_name(name);
                        CAPTURE(metric_name);
                        CHECK(a.get(name) == b.get(name));
                    }
                    // Not symmetric: tpr and ppv trade places.
                    CHECK(a.tpr == b.ppv);
                    if (a.tnr) CHECK(*a.fpr == 1.0 - *a.tnr);
                    if (a.tpr) CHECK(*a.fnr == 1.0 - *a.tpr);
                    CHECK(v(a.gce) >= 0.0);
                    CHECK((v(a.gce) == 0.0) == (fp == 0 && fn == 0));
                }
    }
    // RAVD and PBD are direction dependent.
    const auto c = ConfusionCounts::from(4, 10, 4, 0);
    CHECK(v(voxel_metric_set(c).ravd) == 1.0);
    CHECK(v(voxel_metric_set(c.swapped()).ravd) == -0.5);
    const auto empty_gt = ConfusionCounts::from(0, 10, 3, 0);
    CHECK_FALSE(voxel_metric_set(empty_gt).ravd.has_value());
    CHECK(v(voxel_metric_set(empty_gt.swapped()).ravd) == -1.0);
}

TEST_CASE("scale invariance of ratio metrics") {
    const VoxelMetricSet base = voxel_metric_set(kExample);
    for (std::uint64_t k : {2, 10, 1000}) {
        const auto scaled = ConfusionCounts::from(6 * k, 54 * k, 2 * k, 2 * k);
        const VoxelMetricSet m = voxel_metric_set(scaled);
        for (const char* name : {"tpr", "tnr", "fpr", "fnr", "ppv", "dice", "jaccard", "auc", "mcc", "cks", "nmi",
                                 "pbd", "vs", "ravd"}) {
            const std::string metric_name(name);
                        CAPTURE(metric_name);
            CHECK(v(m.get(name)) == Approx(v(base.get(name))).epsilon(1e-12));
        }
    }
    const double ari3 = v(adjusted_rand_index(ConfusionCounts::from(6000, 54000, 2000, 2000)));
    const double ari4 = v(adjusted_rand_index(ConfusionCounts::from(60000, 540000, 20000, 20000)));
    CHECK(std::abs(ari3 - ari4) < 1e-3);
}

TEST_CASE("mask overload composes the individual operations") {
    std::mt19937_64 rng(5);
    const Geometry g = test::grid(8, 8, 8);
    const BinaryMask gt = test::random_mask(g, 0.3, rng);
    const BinaryMask pred = test::random_mask(g, 0.4, rng);
    const ConfusionCounts c = confusion_counts(gt, pred);
    const VoxelMetricSet m = voxel_metric_set(gt, pred);
    const OverlapMetrics o = overlap_metrics(c);
    const VolumeMetrics vol = volume_metrics(c);
    const InformationMetrics info = information_metrics(c);
    const ProbabilisticMetrics p = probabilistic_metrics(c);
    CHECK(m.dice == o.dice);
    CHECK(m.gce == o.gce);
    CHECK(m.tnr == o.tnr);
    CHECK(m.vs == vol.vs);
    CHECK(m.ravd == vol.ravd);
    CHECK(m.nmi == info.nmi);
    CHECK(m.voi == info.voi);
    CHECK(m.mcc == p.mcc);
    CHECK(m.ari == p.ari);
    CHECK(m.pbd == p.pbd);

    const auto reference = oracle::voxel_metrics(gt.values(), pred.values());
    const auto values = m.values();
    for (std::size_t i = 0; i < kVoxelMetricCount; ++i) {
        CAPTURE(VoxelMetricSet::names[i]);
        REQUIRE(values[i].has_value() == reference[i].has_value());
        if (values[i]) CHECK(*values[i] == Approx(*reference[i]).epsilon(1e-9));
    }
}

TEST_CASE("identity and empty-prediction mask sets") {
    const Geometry g = test::grid(6, 6, 6);
    const BinaryMask gt = test::box(g, {1, 1, 1}, {4, 4, 4});
    const VoxelMetricSet same = voxel_metric_set(gt, gt);
    for (const char* name : {"tpr", "tnr", "ppv", "dice", "jaccard", "iou", "auc", "mcc", "cks", "nmi", "ari", "vs"}) {
        const std::string metric_name(name);
                        CAPTURE(metric_name);
        CHECK(v(same.get(name)) == Approx(1.0).epsilon(1e-15));
    }
    for (const char* name : {"fpr", "fnr", "gce", "voi", "pbd", "ravd"}) {
        const std::string metric_name(name);
                        CAPTURE(metric_name);
        CHECK(v(same.get(name)) == 0.0);
    }
    const VoxelMetricSet empty = voxel_metric_set(gt, BinaryMask::empty(g));
    CHECK(v(empty.dice) == 0.0);
    CHECK(v(empty.ravd) == -1.0);
}

TEST_CASE("metric names") {
    CHECK(VoxelMetricSet::has_metric("dice"));
    CHECK_FALSE(VoxelMetricSet::has_metric("hd95"));
    CHECK_FALSE(voxel_metric_set(kExample).get("nope").has_value());
}
