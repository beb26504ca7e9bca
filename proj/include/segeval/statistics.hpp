#pragma once

#include <optional>
#include <span>
#include <vector>

namespace segeval {

/// Linear-interpolation percentile over an ascending range, rank = q * (n - 1).
/// q in [0, 1]; the range must be nonempty.
double percentile_sorted(std::span<const double> sorted, double q);

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> values);

/// Pearson product-moment coefficient; nullopt when either side has zero
/// variance or fewer than two samples.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based, ties share their mean rank).
std::vector<double> average_ranks(std::span<const double> values);

std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

}  // namespace segeval
