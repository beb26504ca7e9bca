#include "segeval/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>

namespace segeval::oracle {
namespace {

MetricValue divide(double num, double den) {
    if (den == 0.0) return std::nullopt;
    return num / den;
}

double plogp(double p) {
    // p = 1 whenever the underlying count is zero, so log2(p) = 0.
    return std::log2(p);
}

}  // namespace

void realise_counts(const ConfusionCounts& c, std::vector<std::uint8_t>& gt, std::vector<std::uint8_t>& pred) {
    gt.clear();
    pred.clear();
    const auto push = [&](std::uint64_t n, std::uint8_t g, std::uint8_t d) {
        for (std::uint64_t i = 0; i < n; ++i) {
            gt.push_back(g);
            pred.push_back(d);
        }
    };
    push(c.tp, 1, 1);
    push(c.tn, 0, 0);
    push(c.fp, 0, 1);
    push(c.fn, 1, 0);
}

std::array<MetricValue, kVoxelMetricCount> voxel_metrics(std::span<const std::uint8_t> g,
                                                         std::span<const std::uint8_t> d) {
    const std::size_t X = g.size();
    double TP = 0, TN = 0, FP = 0, FN = 0, inter = 0, uni = 0, absdiff = 0, prod = 0, vol_g = 0, vol_d = 0;
    for (std::size_t x = 0; x < X; ++x) {
        TP += (g[x] == 1) && (d[x] == 1);
        TN += (g[x] == 0) && (d[x] == 0);
        FP += (g[x] == 0) && (d[x] == 1);
        FN += (g[x] == 1) && (d[x] == 0);
        inter += (g[x] & d[x]);
        uni += (g[x] | d[x]);
        absdiff += std::abs(static_cast<int>(g[x]) - static_cast<int>(d[x]));
        prod += g[x] * d[x];
        vol_g += g[x];
        vol_d += d[x];
    }
    const double Xd = static_cast<double>(X);

    const MetricValue TPR = divide(TP, TP + FN);
    const MetricValue TNR = divide(TN, TN + FP);
    const MetricValue FPR = divide(FP, FP + TN);
    const MetricValue FNR = divide(FN, FN + TP);
    const MetricValue PPV = divide(TP, TP + FP);
    const MetricValue Dice = (TP + FP + FN == 0) ? MetricValue(1.0) : divide(2 * TP, 2 * TP + FP + FN);
    const MetricValue J = divide(TP, TP + FP + FN);
    const MetricValue IoU = divide(inter, uni);

    MetricValue AUC;
    if (FPR && FNR) AUC = 1 - (*FPR + *FNR) / 2;

    MetricValue GCE;
    if (X > 0) {
        const auto frac = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };
        const double left = frac(FN * (FN + 2 * TP), TP + FN) + frac(FP * (FP + 2 * TN), TN + FP);
        const double right = frac(FP * (FP + 2 * TP), TP + FP) + frac(FN * (FN + 2 * TN), TN + FN);
        GCE = (1.0 / Xd) * std::min(left, right);
    }

    MetricValue MCC;
    const double root = std::sqrt((TP + FP) * (TP + FN) * (TN + FP) * (TN + FN));
    if (root != 0.0) MCC = ((TP * TN) - (FP * FN)) / root;

    MetricValue CKS;
    if (X > 0) {
        const double p0 = (TP + TN) / Xd;
        const double pe = ((TP + FN) * (TP + FP) + (TN + FP) * (TN + FN)) / (Xd * Xd);
        if (pe != 1.0) CKS = (p0 - pe) / (1 - pe);
    }

    // Pair counting over every unordered voxel pair.
    double a = 0, b = 0, c = 0, dd = 0;
    for (std::size_t i = 0; i < X; ++i) {
        for (std::size_t j = i + 1; j < X; ++j) {
            const bool same_g = g[i] == g[j];
            const bool same_d = d[i] == d[j];
            if (same_g && same_d) a += 1;
            else if (same_g) b += 1;
            else if (same_d) c += 1;
            else dd += 1;
        }
    }
    const MetricValue ARI = divide(2 * (a * dd - b * c), (a + b) * (b + dd) + (a + c) * (c + dd));

    MetricValue NMI, VOI;
    if (X > 0) {
        const double pg = (FN + TP) / Xd;
        const double pd = (FP + TP) / Xd;
        const double qg = 1 - pg;
        const double qd = 1 - pd;
        const double h1 = -((pg > 0 ? pg * plogp(pg) : 0) + (qg > 0 ? qg * plogp(qg) : 0));
        const double h2 = -((pd > 0 ? pd * plogp(pd) : 0) + (qd > 0 ? qd * plogp(qd) : 0));
        const double p00 = TN == 0 ? 1 : TN / Xd;
        const double p01 = FN == 0 ? 1 : FN / Xd;
        const double p10 = FP == 0 ? 1 : FP / Xd;
        const double p11 = TP == 0 ? 1 : TP / Xd;
        const double h12 = -(std::log2(p00) * TN / Xd + std::log2(p01) * FN / Xd + std::log2(p10) * FP / Xd +
                             std::log2(p11) * TP / Xd);
        const double MI = h1 + h2 - h12;
        VOI = h1 + h2 - (2 * MI);
        NMI = (h1 + h2 == 0) ? 1.0 : 2 * MI / (h1 + h2);
    }

    MetricValue PBD;
    if (prod == 0) {
        PBD = absdiff == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        PBD = absdiff / (2 * prod);
    }

    MetricValue VS;
    if (vol_g + vol_d > 0) VS = 1 - std::abs(vol_d - vol_g) / (vol_g + vol_d);
    const MetricValue RAVD = divide(vol_d - vol_g, vol_g);

    return {TPR, TNR, FPR, FNR, PPV, Dice, J, IoU, GCE, AUC, MCC, CKS, NMI, VOI, PBD, ARI, VS, RAVD};
}

MetricValue ari_as_printed(const ConfusionCounts& cc) {
    const double TP = static_cast<double>(cc.tp), TN = static_cast<double>(cc.tn);
    const double FP = static_cast<double>(cc.fp), FN = static_cast<double>(cc.fn);
    const double HWD = static_cast<double>(cc.x);
    const double a = 0.5 * ((TP * (TP - 1)) + (FP * (FP - 1)) + (TN * (TN - 1)) + (FN * (FN - 1)));
    const double b = 0.5 * (((TP + FN) * (TP + FN) + (TN + FP) * (TN + FP)) - (TP * TP + TN * TN + FP * FP + FN * FN));
    const double c = 0.5 * (((TP + FP) * (TP + FP) + (TN + FN) * (TN + FN)) - (TP * TP + TN * TN + FP * FP + FN * FN));
    if (a + b + c == 0) return std::nullopt;
    const double d = (HWD * (HWD - 1)) / (2 * (a + b + c));
    return divide(2 * (a * b - b * c), c * c + b * b + 2 * a * b + (a + d) * (c + b));
}

std::vector<Point3> border_points(const BinaryMask& mask) {
    std::vector<Point3> out;
    const auto [nx, ny, nz] = mask.dims();
    const auto inside = [&](long i, long j, long k) {
        if (i < 0 || j < 0 || k < 0 || i >= static_cast<long>(nx) || j >= static_cast<long>(ny) ||
            k >= static_cast<long>(nz)) {
            return false;
        }
        return mask.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k));
    };
    for (long k = 0; k < static_cast<long>(nz); ++k)
        for (long j = 0; j < static_cast<long>(ny); ++j)
            for (long i = 0; i < static_cast<long>(nx); ++i) {
                if (!inside(i, j, k)) continue;
                if (!inside(i - 1, j, k) || !inside(i + 1, j, k) || !inside(i, j - 1, k) || !inside(i, j + 1, k) ||
                    !inside(i, j, k - 1) || !inside(i, j, k + 1)) {
                    out.push_back({static_cast<double>(i) * mask.spacing()[0], static_cast<double>(j) * mask.spacing()[1],
                                   static_cast<double>(k) * mask.spacing()[2]});
                }
            }
    return out;
}

std::vector<double> directed_distances(std::span<const Point3> from, std::span<const Point3> to) {
    std::vector<double> out;
    for (const Point3& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point3& q : to) {
            const double dx = p.x - q.x;
            const double dy = p.y - q.y;
            const double dz = p.z - q.z;
            best = std::min(best, std::sqrt(dx * dx + dy * dy + dz * dz));
        }
        out.push_back(best);
    }
    return out;
}

MetricValue hd95(const BinaryMask& gt, const BinaryMask& pred) {
    const auto a = border_points(gt);
    const auto b = border_points(pred);
    if (a.empty() || b.empty()) return std::nullopt;
    std::vector<double> all = directed_distances(a, b);
    const auto back = directed_distances(b, a);
    all.insert(all.end(), back.begin(), back.end());
    std::sort(all.begin(), all.end());
    const double rank = 0.95 * static_cast<double>(all.size() - 1);
    const auto lo = static_cast<std::size_t>(rank);
    const std::size_t hi = std::min(lo + 1, all.size() - 1);
    return all[lo] + (rank - static_cast<double>(lo)) * (all[hi] - all[lo]);
}

MetricValue assd(const BinaryMask& gt, const BinaryMask& pred) {
    const auto a = border_points(gt);
    const auto b = border_points(pred);
    if (a.empty() || b.empty()) return std::nullopt;
    double forward = 0, backward = 0;
    for (double v : directed_distances(a, b)) forward += v;
    for (double v : directed_distances(b, a)) backward += v;
    return (forward + backward) / static_cast<double>(a.size() + b.size());
}

std::vector<std::uint32_t> flood_fill_labels(const BinaryMask& mask, Connectivity connectivity) {
    const auto [nx, ny, nz] = mask.dims();
    const int limit = static_cast<int>(connectivity) == 6 ? 1 : (static_cast<int>(connectivity) == 18 ? 2 : 3);
    std::vector<std::uint32_t> labels(mask.values().size(), 0);
    std::uint32_t next = 0;
    for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) {
                const std::size_t seed = mask.geometry().index(i, j, k);
                if (!mask.at(i, j, k) || labels[seed] != 0) continue;
                labels[seed] = ++next;
                std::deque<std::array<long, 3>> queue{{static_cast<long>(i), static_cast<long>(j), static_cast<long>(k)}};
                while (!queue.empty()) {
                    const auto [ci, cj, ck] = queue.front();
                    queue.pop_front();
                    for (int dk = -1; dk <= 1; ++dk)
                        for (int dj = -1; dj <= 1; ++dj)
                            for (int di = -1; di <= 1; ++di) {
                                const int manhattan = std::abs(di) + std::abs(dj) + std::abs(dk);
                                if (manhattan == 0 || manhattan > limit) continue;
                                const long a = ci + di, b = cj + dj, c = ck + dk;
                                if (a < 0 || b < 0 || c < 0 || a >= static_cast<long>(nx) ||
                                    b >= static_cast<long>(ny) || c >= static_cast<long>(nz)) {
                                    continue;
                                }
                                const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b),
                                           uc = static_cast<std::size_t>(c);
                                const std::size_t v = mask.geometry().index(ua, ub, uc);
                                if (mask.at(ua, ub, uc) && labels[v] == 0) {
                                    labels[v] = next;
                                    queue.push_back({a, b, c});
                                }
                            }
                }
            }
    return labels;
}

}  // namespace segeval::oracle
