#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "segeval/surface_metrics.hpp"

namespace segeval::detail {

// Static 3-d tree answering exact nearest-neighbour queries. Distances are
// compared as squared_distance() values, so results are bit-identical to an
// exhaustive scan.
class KdTree {
public:
    explicit KdTree(std::span<const Point3> points);

    double nearest_squared(const Point3& query) const;

private:
    struct Node {
        std::uint32_t begin, end;  // leaf point range
        std::int32_t left = -1, right = -1;
        int axis = 0;
        double split = 0.0;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::int32_t node, const Point3& query, double& best) const;

    std::vector<Point3> points_;
    std::vector<Node> nodes_;
};

}  // namespace segeval::detail
