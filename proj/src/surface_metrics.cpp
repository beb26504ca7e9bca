#include "segeval/surface_metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "kdtree.hpp"
#include "segeval/error.hpp"
#include "segeval/statistics.hpp"

namespace segeval {
namespace {

using Matrix3 = std::array<std::array<double, 3>, 3>;

double determinant(const Matrix3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Matrix3 adjugate(const Matrix3& m) {
    Matrix3 a{};
    a[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    a[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
    a[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
    a[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
    a[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
    a[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
    a[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    a[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
    a[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return a;
}

struct CloudMoments {
    std::array<double, 3> mean{};
    Matrix3 scatter{};  // sum of centred outer products
    std::size_t n = 0;
};

CloudMoments moments(std::span<const Point3> points) {
    CloudMoments m;
    m.n = points.size();
    for (const Point3& p : points) {
        m.mean[0] += p.x;
        m.mean[1] += p.y;
        m.mean[2] += p.z;
    }
    for (double& c : m.mean) c /= static_cast<double>(m.n);
    for (const Point3& p : points) {
        const double d[3] = {p.x - m.mean[0], p.y - m.mean[1], p.z - m.mean[2]};
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m.scatter[r][c] += d[r] * d[c];
    }
    return m;
}

double sum(std::span<const double> values) {
    double total = 0.0;
    for (double v : values) total += v;
    return total;
}

// Consumes both directed lists.
double percentile_distance(std::vector<double>& ab, std::vector<double>& ba, Hd95Mode mode) {
    if (mode == Hd95Mode::max_directed) {
        std::sort(ab.begin(), ab.end());
        std::sort(ba.begin(), ba.end());
        return std::max(percentile_sorted(ab, kHausdorffPercentile), percentile_sorted(ba, kHausdorffPercentile));
    }
    ab.insert(ab.end(), ba.begin(), ba.end());
    std::sort(ab.begin(), ab.end());
    return percentile_sorted(ab, kHausdorffPercentile);
}

}  // namespace

SurfacePointSet extract_border(const BinaryMask& mask) {
    SurfacePointSet out;
    const auto [nx, ny, nz] = mask.dims();
    const auto values = mask.values();
    const Geometry& g = mask.geometry();
    for (std::size_t k = 0; k < nz; ++k) {
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                const std::size_t v = g.index(i, j, k);
                if (!values[v]) continue;
                const bool border = i == 0 || i + 1 == nx || j == 0 || j + 1 == ny || k == 0 || k + 1 == nz ||
                                    !values[v - 1] || !values[v + 1] || !values[v - nx] || !values[v + nx] ||
                                    !values[v - nx * ny] || !values[v + nx * ny];
                if (border) out.points.push_back(physical_point(g.spacing, i, j, k));
            }
        }
    }
    return out;
}

std::vector<double> directed_surface_distances(const SurfacePointSet& from, const SurfacePointSet& to) {
    if (from.empty() || to.empty()) {
        throw Error(ErrorCode::empty_surface, "directed surface distance needs two nonempty surfaces");
    }
    const detail::KdTree tree(to.points);
    std::vector<double> out;
    out.reserve(from.size());
    for (const Point3& p : from.points) out.push_back(std::sqrt(tree.nearest_squared(p)));
    return out;
}

MetricValue hd95(const SurfacePointSet& a, const SurfacePointSet& b, Hd95Mode mode) {
    if (a.empty() || b.empty()) return std::nullopt;
    auto ab = directed_surface_distances(a, b);
    auto ba = directed_surface_distances(b, a);
    return percentile_distance(ab, ba, mode);
}

MetricValue assd(const SurfacePointSet& a, const SurfacePointSet& b) {
    if (a.empty() || b.empty()) return std::nullopt;
    const auto ab = directed_surface_distances(a, b);
    const auto ba = directed_surface_distances(b, a);
    // Per-direction sums added once so the result is exactly symmetric.
    return (sum(ab) + sum(ba)) / static_cast<double>(ab.size() + ba.size());
}

MetricValue hd95(const BinaryMask& gt, const BinaryMask& pred, Hd95Mode mode) {
    check_geometry(gt.geometry(), pred.geometry());
    return hd95(extract_border(gt), extract_border(pred), mode);
}

MetricValue assd(const BinaryMask& gt, const BinaryMask& pred) {
    check_geometry(gt.geometry(), pred.geometry());
    return assd(extract_border(gt), extract_border(pred));
}

std::vector<Point3> foreground_points(const BinaryMask& mask) {
    std::vector<Point3> out;
    const auto [nx, ny, nz] = mask.dims();
    const auto values = mask.values();
    std::size_t v = 0;
    for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i, ++v)
                if (values[v]) out.push_back(physical_point(mask.spacing(), i, j, k));
    return out;
}

MetricValue mahalanobis(std::span<const Point3> a, std::span<const Point3> b) {
    if (a.empty() || b.empty()) return std::nullopt;
    const CloudMoments ma = moments(a);
    const CloudMoments mb = moments(b);
    const double total = static_cast<double>(ma.n + mb.n);
    Matrix3 cov{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) cov[r][c] = (ma.scatter[r][c] + mb.scatter[r][c]) / total;

    const double trace = cov[0][0] + cov[1][1] + cov[2][2];
    const double scale = trace / 3.0;
    double det = determinant(cov);
    if (!(trace > 0.0) || !(det > 1e-12 * scale * scale * scale)) {
        for (int d = 0; d < 3; ++d) cov[d][d] += kCovarianceRegularization;
        det = determinant(cov);
    }
    const Matrix3 adj = adjugate(cov);
    const double diff[3] = {ma.mean[0] - mb.mean[0], ma.mean[1] - mb.mean[1], ma.mean[2] - mb.mean[2]};
    double quad = 0.0;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) quad += diff[r] * adj[r][c] * diff[c];
    return std::sqrt(std::max(0.0, quad / det));
}

MetricValue mahalanobis(const BinaryMask& gt, const BinaryMask& pred) {
    check_geometry(gt.geometry(), pred.geometry());
    return mahalanobis(foreground_points(gt), foreground_points(pred));
}

DistanceReport distance_report(const BinaryMask& gt, const SurfacePointSet& gt_border, const BinaryMask& pred,
                               Hd95Mode mode) {
    check_geometry(gt.geometry(), pred.geometry());
    DistanceReport report;
    const SurfacePointSet pred_border = extract_border(pred);
    if (gt_border.empty() || pred_border.empty()) return report;

    auto ab = directed_surface_distances(gt_border, pred_border);
    auto ba = directed_surface_distances(pred_border, gt_border);
    report.assd = (sum(ab) + sum(ba)) / static_cast<double>(ab.size() + ba.size());
    report.hd95 = percentile_distance(ab, ba, mode);
    report.mhd = mahalanobis(foreground_points(gt), foreground_points(pred));
    return report;
}

DistanceReport distance_report(const BinaryMask& gt, const BinaryMask& pred, Hd95Mode mode) {
    return distance_report(gt, extract_border(gt), pred, mode);
}

}  // namespace segeval
