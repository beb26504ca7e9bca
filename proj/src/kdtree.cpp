#include "kdtree.hpp"

#include <algorithm>

namespace segeval::detail {
namespace {

constexpr std::uint32_t kLeafSize = 8;

double coord(const Point3& p, int axis) {
    return axis == 0 ? p.x : (axis == 1 ? p.y : p.z);
}

}  // namespace

KdTree::KdTree(std::span<const Point3> points) : points_(points.begin(), points.end()) {
    if (!points_.empty()) {
        nodes_.reserve(2 * points_.size() / kLeafSize + 1);
        build(0, static_cast<std::uint32_t>(points_.size()));
    }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
    const auto index = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize) return index;

    Point3 lo = points_[begin], hi = points_[begin];
    for (std::uint32_t i = begin + 1; i < end; ++i) {
        lo = {std::min(lo.x, points_[i].x), std::min(lo.y, points_[i].y), std::min(lo.z, points_[i].z)};
        hi = {std::max(hi.x, points_[i].x), std::max(hi.y, points_[i].y), std::max(hi.z, points_[i].z)};
    }
    const double extent[3] = {hi.x - lo.x, hi.y - lo.y, hi.z - lo.z};
    const int axis = static_cast<int>(std::max_element(extent, extent + 3) - extent);
    if (extent[axis] == 0.0) return index;  // coincident points

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(points_.begin() + begin, points_.begin() + mid, points_.begin() + end,
                     [axis](const Point3& a, const Point3& b) { return coord(a, axis) < coord(b, axis); });
    const double split = coord(points_[mid], axis);
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[index].axis = axis;
    nodes_[index].split = split;
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

void KdTree::search(std::int32_t node_index, const Point3& query, double& best) const {
    const Node& node = nodes_[node_index];
    if (node.left < 0) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            best = std::min(best, squared_distance(query, points_[i]));
        }
        return;
    }
    // Left holds coordinates <= split, right holds coordinates >= split.
    const double delta = coord(query, node.axis) - node.split;
    const std::int32_t near = delta < 0.0 ? node.left : node.right;
    const std::int32_t far = delta < 0.0 ? node.right : node.left;
    search(near, query, best);
    if (delta * delta <= best) search(far, query, best);
}

double KdTree::nearest_squared(const Point3& query) const {
    double best = std::numeric_limits<double>::infinity();
    if (!nodes_.empty()) search(0, query, best);
    return best;
}

}  // namespace segeval::detail
