#include "segeval/instance_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "segeval/error.hpp"

namespace segeval {
namespace {

class DisjointSets {
public:
    std::uint32_t make() {
        parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
        return parent_.back();
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) std::swap(a, b);
        parent_[a] = b;
    }

private:
    std::vector<std::uint32_t> parent_;
};

struct Offset {
    std::ptrdiff_t di, dj, dk;
};

// Neighbours already visited by a raster scan (k, then j, then i ascending).
std::vector<Offset> backward_offsets(Connectivity connectivity) {
    const int limit = connectivity == Connectivity::six ? 1 : (connectivity == Connectivity::eighteen ? 2 : 3);
    std::vector<Offset> out;
    for (int dk = -1; dk <= 0; ++dk)
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                const bool before = dk < 0 || (dk == 0 && dj < 0) || (dk == 0 && dj == 0 && di < 0);
                if (before && std::abs(di) + std::abs(dj) + std::abs(dk) <= limit) out.push_back({di, dj, dk});
            }
    return out;
}

void grow(ComponentInfo& info, std::size_t i, std::size_t j, std::size_t k) {
    if (info.voxel_count == 0) {
        info.bbox_min = info.bbox_max = {i, j, k};
    } else {
        info.bbox_min = {std::min(info.bbox_min[0], i), std::min(info.bbox_min[1], j), std::min(info.bbox_min[2], k)};
        info.bbox_max = {std::max(info.bbox_max[0], i), std::max(info.bbox_max[1], j), std::max(info.bbox_max[2], k)};
    }
    ++info.voxel_count;
}

// Optimal assignment maximising total weight; returns row -> column (-1 when unassigned).
// Classic O(n^2 m) shortest augmenting path on a square padded cost matrix.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
    const std::size_t rows = weight.size();
    const std::size_t cols = rows == 0 ? 0 : weight[0].size();
    const std::size_t n = std::max(rows, cols);
    const double inf = std::numeric_limits<double>::infinity();
    auto cost = [&](std::size_t r, std::size_t c) {
        return (r < rows && c < cols) ? -weight[r][c] : 0.0;
    };
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assignment(rows, -1);
    for (std::size_t j = 1; j <= n; ++j) {
        if (p[j] != 0 && p[j] - 1 < rows && j - 1 < cols) assignment[p[j] - 1] = static_cast<int>(j - 1);
    }
    return assignment;
}

}  // namespace

Connectivity parse_connectivity(int neighbours) {
    switch (neighbours) {
        case 6: return Connectivity::six;
        case 18: return Connectivity::eighteen;
        case 26: return Connectivity::twenty_six;
        default:
            throw Error(ErrorCode::invalid_argument, "connectivity must be 6, 18 or 26, got " + std::to_string(neighbours));
    }
}

ComponentLabeling connected_components(const BinaryMask& mask, Connectivity connectivity) {
    ComponentLabeling out;
    out.geometry = mask.geometry();
    const auto [nx, ny, nz] = mask.dims();
    const auto values = mask.values();
    out.labels.assign(values.size(), 0);

    const auto offsets = backward_offsets(connectivity);
    DisjointSets sets;
    sets.make();  // slot 0 stays background
    std::size_t v = 0;
    for (std::size_t k = 0; k < nz; ++k) {
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i, ++v) {
                if (!values[v]) continue;
                std::uint32_t label = 0;
                for (const Offset& o : offsets) {
                    const auto ni = static_cast<std::ptrdiff_t>(i) + o.di;
                    const auto nj = static_cast<std::ptrdiff_t>(j) + o.dj;
                    const auto nk = static_cast<std::ptrdiff_t>(k) + o.dk;
                    if (ni < 0 || nj < 0 || nk < 0 || ni >= static_cast<std::ptrdiff_t>(nx) ||
                        nj >= static_cast<std::ptrdiff_t>(ny)) {
                        continue;
                    }
                    const std::uint32_t neighbour = out.labels[out.geometry.index(
                        static_cast<std::size_t>(ni), static_cast<std::size_t>(nj), static_cast<std::size_t>(nk))];
                    if (neighbour == 0) continue;
                    if (label == 0) {
                        label = neighbour;
                    } else {
                        sets.unite(label, neighbour);
                    }
                }
                out.labels[v] = label == 0 ? sets.make() : label;
            }
        }
    }

    // Second pass: dense labels in raster order of first appearance.
    std::unordered_map<std::uint32_t, std::uint32_t> dense;
    v = 0;
    for (std::size_t k = 0; k < nz; ++k) {
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i, ++v) {
                if (out.labels[v] == 0) continue;
                const std::uint32_t root = sets.find(out.labels[v]);
                auto [it, inserted] = dense.try_emplace(root, static_cast<std::uint32_t>(dense.size() + 1));
                if (inserted) out.components.emplace_back();
                out.labels[v] = it->second;
                grow(out.components[it->second - 1], i, j, k);
            }
        }
    }
    return out;
}

ComponentLabeling filter_small(const ComponentLabeling& labeling, std::size_t min_voxels) {
    ComponentLabeling out;
    out.geometry = labeling.geometry;
    std::vector<std::uint32_t> remap(labeling.components.size() + 1, 0);
    for (std::size_t c = 0; c < labeling.components.size(); ++c) {
        if (labeling.components[c].voxel_count >= min_voxels) {
            out.components.push_back(labeling.components[c]);
            remap[c + 1] = static_cast<std::uint32_t>(out.components.size());
        }
    }
    out.labels.resize(labeling.labels.size());
    std::transform(labeling.labels.begin(), labeling.labels.end(), out.labels.begin(),
                   [&remap](std::uint32_t label) { return remap[label]; });
    return out;
}

SurfacePointSet component_border(const ComponentLabeling& labeling, std::uint32_t label) {
    SurfacePointSet out;
    const ComponentInfo& info = labeling.info(label);
    const Geometry& g = labeling.geometry;
    const auto [nx, ny, nz] = g.dims;
    const auto in = [&](std::size_t i, std::size_t j, std::size_t k) { return labeling.labels[g.index(i, j, k)] == label; };
    for (std::size_t k = info.bbox_min[2]; k <= info.bbox_max[2]; ++k) {
        for (std::size_t j = info.bbox_min[1]; j <= info.bbox_max[1]; ++j) {
            for (std::size_t i = info.bbox_min[0]; i <= info.bbox_max[0]; ++i) {
                if (!in(i, j, k)) continue;
                const bool border = i == 0 || i + 1 == nx || j == 0 || j + 1 == ny || k == 0 || k + 1 == nz ||
                                    !in(i - 1, j, k) || !in(i + 1, j, k) || !in(i, j - 1, k) || !in(i, j + 1, k) ||
                                    !in(i, j, k - 1) || !in(i, j, k + 1);
                if (border) out.points.push_back(physical_point(g.spacing, i, j, k));
            }
        }
    }
    return out;
}

InstancePairing pair_instances(const ComponentLabeling& gt, const ComponentLabeling& pred, PairingStrategy strategy) {
    check_geometry(gt.geometry, pred.geometry);

    std::unordered_map<std::uint64_t, std::size_t> overlap;
    for (std::size_t v = 0; v < gt.labels.size(); ++v) {
        if (gt.labels[v] != 0 && pred.labels[v] != 0) {
            ++overlap[(static_cast<std::uint64_t>(gt.labels[v]) << 32) | pred.labels[v]];
        }
    }

    std::vector<InstancePair> candidates;
    candidates.reserve(overlap.size());
    for (const auto& [key, count] : overlap) {
        const auto g = static_cast<std::uint32_t>(key >> 32);
        const auto p = static_cast<std::uint32_t>(key & 0xFFFFFFFFu);
        const double dice = 2.0 * static_cast<double>(count) /
                            static_cast<double>(gt.info(g).voxel_count + pred.info(p).voxel_count);
        candidates.push_back({g, p, dice});
    }

    std::vector<bool> gt_used(gt.component_count() + 1, false);
    std::vector<bool> pred_used(pred.component_count() + 1, false);
    InstancePairing out;

    if (strategy == PairingStrategy::greedy) {
        std::sort(candidates.begin(), candidates.end(), [&](const InstancePair& a, const InstancePair& b) {
            if (a.dice != b.dice) return a.dice > b.dice;
            const std::size_t size_a = gt.info(a.gt_label).voxel_count;
            const std::size_t size_b = gt.info(b.gt_label).voxel_count;
            if (size_a != size_b) return size_a > size_b;
            if (a.gt_label != b.gt_label) return a.gt_label < b.gt_label;
            return a.pred_label < b.pred_label;
        });
        for (const InstancePair& c : candidates) {
            if (gt_used[c.gt_label] || pred_used[c.pred_label]) continue;
            gt_used[c.gt_label] = pred_used[c.pred_label] = true;
            out.pairs.push_back(c);
        }
    } else {
        std::vector<std::vector<double>> weight(gt.component_count(), std::vector<double>(pred.component_count(), 0.0));
        for (const InstancePair& c : candidates) weight[c.gt_label - 1][c.pred_label - 1] = c.dice;
        const auto assignment = max_weight_assignment(weight);
        for (std::size_t g = 0; g < assignment.size(); ++g) {
            if (assignment[g] < 0) continue;
            const double dice = weight[g][static_cast<std::size_t>(assignment[g])];
            if (dice <= 0.0) continue;
            const auto gl = static_cast<std::uint32_t>(g + 1);
            const auto pl = static_cast<std::uint32_t>(assignment[g] + 1);
            gt_used[gl] = pred_used[pl] = true;
            out.pairs.push_back({gl, pl, dice});
        }
    }

    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const InstancePair& a, const InstancePair& b) { return a.gt_label < b.gt_label; });
    for (std::uint32_t g = 1; g <= gt.component_count(); ++g)
        if (!gt_used[g]) out.unmatched_gt.push_back(g);
    for (std::uint32_t p = 1; p <= pred.component_count(); ++p)
        if (!pred_used[p]) out.unmatched_pred.push_back(p);
    return out;
}

std::string to_string(DetectionStatus status) {
    switch (status) {
        case DetectionStatus::true_positive: return "true_positive";
        case DetectionStatus::false_negative_with_fp: return "false_negative_with_fp";
        case DetectionStatus::false_negative_empty: return "false_negative_empty";
    }
    return "unknown";
}

PatientDetection patient_detection(const ConfusionCounts& counts, double threshold) {
    if (counts.tp + counts.fn == 0) {
        throw Error(ErrorCode::empty_ground_truth, "patient detection needs a nonempty ground truth");
    }
    PatientDetection out;
    out.patient_dice = 2.0 * static_cast<double>(counts.tp) / static_cast<double>(2 * counts.tp + counts.fp + counts.fn);
    if (out.patient_dice > threshold) {
        out.status = DetectionStatus::true_positive;
    } else if (counts.tp + counts.fp == 0) {
        out.status = DetectionStatus::false_negative_empty;
    } else {
        out.status = DetectionStatus::false_negative_with_fp;
    }
    return out;
}

PatientDetection patient_detection(const BinaryMask& gt, const BinaryMask& pred, double threshold) {
    return patient_detection(confusion_counts(gt, pred), threshold);
}

ObjectMetricsRow object_metrics(const InstancePairing& pairing, const ComponentLabeling& gt,
                                const ComponentLabeling& pred) {
    ObjectMetricsRow row;
    row.matched = pairing.pairs.size();
    row.unmatched_gt = pairing.unmatched_gt.size();
    row.unmatched_pred = pairing.unmatched_pred.size();
    row.fppp = row.unmatched_pred;

    const auto matched = static_cast<double>(row.matched);
    if (row.matched + row.unmatched_gt == 0) {
        row.recall_undefined = true;
    } else {
        row.recall = matched / static_cast<double>(row.matched + row.unmatched_gt);
    }
    if (row.matched + row.unmatched_pred == 0) {
        row.precision_undefined = true;
    } else {
        row.precision = matched / static_cast<double>(row.matched + row.unmatched_pred);
    }
    if (row.recall + row.precision > 0.0) {
        row.f1 = 2.0 * row.recall * row.precision / (row.recall + row.precision);
    }

    if (!pairing.pairs.empty()) {
        double total = 0.0;
        for (const InstancePair& p : pairing.pairs) {
            total += *assd(component_border(gt, p.gt_label), component_border(pred, p.pred_label));
        }
        row.oassd = total / matched;
    }
    return row;
}

}  // namespace segeval
