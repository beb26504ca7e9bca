#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "segeval/voxel_metrics.hpp"

namespace segeval {

enum class SelftestSuite { confusion, surface, components };

SelftestSuite parse_selftest_suite(const std::string& name);
std::string to_string(SelftestSuite suite);

struct SuiteResult {
    SelftestSuite suite = SelftestSuite::confusion;
    bool passed = true;
    std::size_t cases = 0;
    double max_deviation = 0.0;
    std::vector<std::string> failing;  // metric names (confusion) or case descriptions
};

struct SelftestReport {
    std::vector<SuiteResult> suites;

    bool passed() const;
    std::string summary() const;
};

using CountsMetricFunction = std::function<VoxelMetricSet(const ConfusionCounts&)>;

struct SelftestOptions {
    std::set<SelftestSuite> suites{SelftestSuite::confusion, SelftestSuite::surface, SelftestSuite::components};
    // Implementation under test for the confusion suite; defaults to voxel_metric_set.
    CountsMetricFunction metrics;
    double tolerance = 1e-9;
    std::uint64_t seed = 20220801;
    std::size_t max_total_voxels = 12;
    std::size_t surface_samples = 300;
    std::size_t component_samples = 1000;
};

/// Runs the exhaustive small-instance oracle suites: every confusion count
/// tuple with 1 <= x <= max_total_voxels, random surfaces within 6x6x6 and
/// random labellings within 5x5x5.
SelftestReport oracle_selftest(const SelftestOptions& options = {});

}  // namespace segeval
