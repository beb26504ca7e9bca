#include "segeval/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "segeval/error.hpp"
#include "segeval/instance_metrics.hpp"
#include "segeval/oracle.hpp"
#include "segeval/surface_metrics.hpp"

namespace segeval {
namespace {

// Deviation between two possibly-undefined values; infinity when exactly one is defined.
double deviation(const MetricValue& a, const MetricValue& b) {
    if (!a && !b) return 0.0;
    if (!a || !b) return std::numeric_limits<double>::infinity();
    if (std::isinf(*a) || std::isinf(*b)) return *a == *b ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(*a - *b);
}

BinaryMask random_mask(std::mt19937_64& rng, const Geometry& geometry, double density) {
    std::bernoulli_distribution on(density);
    std::vector<std::uint8_t> values(geometry.voxel_count());
    for (auto& v : values) v = on(rng) ? 1 : 0;
    return BinaryMask(geometry, std::move(values));
}

Geometry random_geometry(std::mt19937_64& rng, std::size_t max_dim, bool anisotropic) {
    std::uniform_int_distribution<std::size_t> dim(1, max_dim);
    std::uniform_real_distribution<double> spacing(0.3, 3.0);
    Geometry g;
    g.dims = {dim(rng), dim(rng), dim(rng)};
    if (anisotropic) g.spacing = {spacing(rng), spacing(rng), spacing(rng)};
    return g;
}

SuiteResult run_confusion(const SelftestOptions& options) {
    SuiteResult result;
    result.suite = SelftestSuite::confusion;
    const CountsMetricFunction metrics =
        options.metrics ? options.metrics : [](const ConfusionCounts& c) { return voxel_metric_set(c); };
    std::vector<double> worst(kVoxelMetricCount, 0.0);
    std::vector<std::uint8_t> gt, pred;
    for (std::uint64_t x = 1; x <= options.max_total_voxels; ++x) {
        for (std::uint64_t tp = 0; tp <= x; ++tp)
            for (std::uint64_t fp = 0; tp + fp <= x; ++fp)
                for (std::uint64_t fn = 0; tp + fp + fn <= x; ++fn) {
                    const auto counts = ConfusionCounts::from(tp, x - tp - fp - fn, fp, fn);
                    oracle::realise_counts(counts, gt, pred);
                    const auto expected = oracle::voxel_metrics(gt, pred);
                    const auto actual = metrics(counts).values();
                    for (std::size_t m = 0; m < kVoxelMetricCount; ++m) {
                        worst[m] = std::max(worst[m], deviation(actual[m], expected[m]));
                    }
                    ++result.cases;
                }
    }
    for (std::size_t m = 0; m < kVoxelMetricCount; ++m) {
        result.max_deviation = std::max(result.max_deviation, worst[m]);
        if (!(worst[m] <= options.tolerance)) result.failing.emplace_back(VoxelMetricSet::names[m]);
    }
    result.passed = result.failing.empty();
    return result;
}

SuiteResult run_surface(const SelftestOptions& options) {
    SuiteResult result;
    result.suite = SelftestSuite::surface;
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> density(0.05, 0.95);
    for (std::size_t s = 0; s < options.surface_samples; ++s) {
        const Geometry g = random_geometry(rng, 6, true);
        const BinaryMask a = random_mask(rng, g, density(rng));
        const BinaryMask b = random_mask(rng, g, density(rng));
        const double dev = std::max(deviation(hd95(a, b), oracle::hd95(a, b)), deviation(assd(a, b), oracle::assd(a, b)));
        result.max_deviation = std::max(result.max_deviation, dev);
        // Nearest-neighbour search is exact, so any difference is a failure.
        if (dev != 0.0) result.failing.push_back("sample " + std::to_string(s));
        ++result.cases;
    }
    result.passed = result.failing.empty();
    return result;
}

SuiteResult run_components(const SelftestOptions& options) {
    SuiteResult result;
    result.suite = SelftestSuite::components;
    std::mt19937_64 rng(options.seed + 1);
    std::uniform_real_distribution<double> density(0.1, 0.9);
    for (std::size_t s = 0; s < options.component_samples; ++s) {
        const Geometry g = random_geometry(rng, 5, false);
        const BinaryMask mask = random_mask(rng, g, density(rng));
        for (Connectivity c : {Connectivity::six, Connectivity::eighteen, Connectivity::twenty_six}) {
            const auto expected = oracle::flood_fill_labels(mask, c);
            const auto actual = connected_components(mask, c).labels;
            const auto mismatches = static_cast<double>(
                std::inner_product(expected.begin(), expected.end(), actual.begin(), std::size_t{0}, std::plus<>(),
                                   [](std::uint32_t a, std::uint32_t b) { return std::size_t{a != b}; }));
            result.max_deviation = std::max(result.max_deviation, mismatches);
            if (mismatches != 0.0) {
                result.failing.push_back("sample " + std::to_string(s) + " connectivity " +
                                         std::to_string(static_cast<int>(c)));
            }
            ++result.cases;
        }
    }
    result.passed = result.failing.empty();
    return result;
}

}  // namespace

SelftestSuite parse_selftest_suite(const std::string& name) {
    if (name == "confusion") return SelftestSuite::confusion;
    if (name == "surface") return SelftestSuite::surface;
    if (name == "components") return SelftestSuite::components;
    throw Error(ErrorCode::invalid_argument, "unknown selftest suite '" + name + "'");
}

std::string to_string(SelftestSuite suite) {
    switch (suite) {
        case SelftestSuite::confusion: return "confusion";
        case SelftestSuite::surface: return "surface";
        case SelftestSuite::components: return "components";
    }
    return "unknown";
}

bool SelftestReport::passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

std::string SelftestReport::summary() const {
    std::ostringstream out;
    for (const SuiteResult& s : suites) {
        char line[160];
        std::snprintf(line, sizeof line, "%-4s %-11s cases=%zu max_deviation=%.3g", s.passed ? "PASS" : "FAIL",
                      to_string(s.suite).c_str(), s.cases, s.max_deviation);
        out << line;
        if (!s.failing.empty()) {
            out << " failing:";
            for (std::size_t i = 0; i < s.failing.size() && i < 10; ++i) out << ' ' << s.failing[i];
            if (s.failing.size() > 10) out << " ...";
        }
        out << '\n';
    }
    if (suites.empty()) out << "no suites selected\n";
    return out.str();
}

SelftestReport oracle_selftest(const SelftestOptions& options) {
    SelftestReport report;
    for (SelftestSuite suite : options.suites) {
        switch (suite) {
            case SelftestSuite::confusion: report.suites.push_back(run_confusion(options)); break;
            case SelftestSuite::surface: report.suites.push_back(run_surface(options)); break;
            case SelftestSuite::components: report.suites.push_back(run_components(options)); break;
        }
    }
    return report;
}

}  // namespace segeval
