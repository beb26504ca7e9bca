#include "segeval/voxel_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "segeval/error.hpp"

namespace segeval {
namespace {

MetricValue ratio(double num, double den) {
    if (den == 0.0) return std::nullopt;
    return num / den;
}

MetricValue ratio(std::uint64_t num, std::uint64_t den) {
    return ratio(static_cast<double>(num), static_cast<double>(den));
}

// -p*log2(p) with the 0*log(0) = 0 convention; p = count / total.
double entropy_term(std::uint64_t count, std::uint64_t total) {
    if (count == 0) return 0.0;
    const double p = static_cast<double>(count) / static_cast<double>(total);
    return p * std::log2(p);
}

// e(e + 2s) / (s + e), zero when e == 0 (which also covers s + e == 0).
double gce_term(std::uint64_t e, std::uint64_t s) {
    if (e == 0) return 0.0;
    const double ed = static_cast<double>(e);
    return ed * (ed + 2.0 * static_cast<double>(s)) / (static_cast<double>(s) + ed);
}

}  // namespace

ConfusionCounts confusion_counts(const BinaryMask& gt, const BinaryMask& pred) {
    check_geometry(gt.geometry(), pred.geometry());
    const auto g = gt.values();
    const auto d = pred.values();
    // Index = 2*g + d: 0 -> TN, 1 -> FP, 2 -> FN, 3 -> TP.
    std::array<std::uint64_t, 4> bins{};
    for (std::size_t v = 0; v < g.size(); ++v) {
        ++bins[(g[v] << 1) | d[v]];
    }
    return {bins[3], bins[0], bins[1], bins[2], static_cast<std::uint64_t>(g.size())};
}

OverlapMetrics overlap_metrics(const ConfusionCounts& c) {
    OverlapMetrics m;
    m.tpr = ratio(c.tp, c.tp + c.fn);
    m.tnr = ratio(c.tn, c.tn + c.fp);
    // Complements are taken literally so that fpr + tnr == 1 and fnr + tpr == 1.
    if (m.tnr) m.fpr = 1.0 - *m.tnr;
    if (m.tpr) m.fnr = 1.0 - *m.tpr;
    m.ppv = ratio(c.tp, c.tp + c.fp);
    if (c.tp + c.fp + c.fn == 0) {
        m.dice = 1.0;
    } else {
        m.dice = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
    }
    m.jaccard = ratio(c.tp, c.tp + c.fp + c.fn);
    m.iou = m.jaccard;
    if (c.x > 0) {
        const double first = gce_term(c.fn, c.tp) + gce_term(c.fp, c.tn);
        const double second = gce_term(c.fp, c.tp) + gce_term(c.fn, c.tn);
        m.gce = std::min(first, second) / static_cast<double>(c.x);
    }
    return m;
}

VolumeMetrics volume_metrics(const ConfusionCounts& c) {
    VolumeMetrics m;
    const std::uint64_t diff = c.fp > c.fn ? c.fp - c.fn : c.fn - c.fp;
    if (const auto r = ratio(diff, 2 * c.tp + c.fp + c.fn)) m.vs = 1.0 - *r;
    m.ravd = ratio(static_cast<double>(c.fp) - static_cast<double>(c.fn), static_cast<double>(c.tp + c.fn));
    return m;
}

InformationMetrics information_metrics(const ConfusionCounts& c) {
    InformationMetrics m;
    if (c.x == 0) return m;
    const std::uint64_t gt_fg = c.fn + c.tp;
    const std::uint64_t pred_fg = c.fp + c.tp;
    const double h1 = -(entropy_term(gt_fg, c.x) + entropy_term(c.x - gt_fg, c.x));
    const double h2 = -(entropy_term(pred_fg, c.x) + entropy_term(c.x - pred_fg, c.x));
    // fn and fp are grouped so swapping gt and pred gives the same rounding.
    const double h12 =
        -((entropy_term(c.tn, c.x) + entropy_term(c.tp, c.x)) + (entropy_term(c.fn, c.x) + entropy_term(c.fp, c.x)));
    const double mi = h1 + h2 - h12;
    m.h1 = h1;
    m.h2 = h2;
    m.h12 = h12;
    m.mi = mi;
    m.voi = std::max(0.0, h1 + h2 - 2.0 * mi);
    m.nmi = (h1 + h2 == 0.0) ? 1.0 : std::clamp(2.0 * mi / (h1 + h2), 0.0, 1.0);
    return m;
}

MetricValue adjusted_rand_index(const ConfusionCounts& c, AriVariant variant) {
    using wide = long double;
    // Pair counts are exact integers; 256^3 volumes keep x^2 well inside 63 bits.
    const auto pairs = [](std::uint64_t n) -> std::int64_t {
        return static_cast<std::int64_t>(n) * (static_cast<std::int64_t>(n) - 1) / 2;
    };
    const std::int64_t same_both = pairs(c.tp) + pairs(c.fp) + pairs(c.tn) + pairs(c.fn);
    const std::int64_t same_gt = pairs(c.tp + c.fn) + pairs(c.tn + c.fp);
    const std::int64_t same_pred = pairs(c.tp + c.fp) + pairs(c.tn + c.fn);
    const wide a = static_cast<wide>(same_both);
    const wide b = static_cast<wide>(same_gt - same_both);
    const wide cc = static_cast<wide>(same_pred - same_both);

    if (variant == AriVariant::corrected) {
        const wide d = static_cast<wide>(pairs(c.x) - same_gt - same_pred + same_both);
        const wide den = cc * cc + b * b + 2 * a * d + (a + d) * (cc + b);
        if (den == 0) return std::nullopt;
        return static_cast<double>(2 * (a * d - b * cc) / den);
    }
    const wide abc = a + b + cc;
    if (abc == 0) return std::nullopt;
    const wide x = static_cast<wide>(c.x);
    const wide d = x * (x - 1) / (2 * abc);
    const wide den = cc * cc + b * b + 2 * a * b + (a + d) * (cc + b);
    if (den == 0) return std::nullopt;
    return static_cast<double>(2 * (a * b - b * cc) / den);
}

ProbabilisticMetrics probabilistic_metrics(const ConfusionCounts& c, AriVariant ari) {
    ProbabilisticMetrics m;
    const OverlapMetrics overlap = overlap_metrics(c);
    if (overlap.fpr && overlap.fnr) m.auc = 1.0 - (*overlap.fpr + *overlap.fnr) / 2.0;

    const std::uint64_t fg_product = (c.tp + c.fp) * (c.tp + c.fn);
    const std::uint64_t bg_product = (c.tn + c.fp) * (c.tn + c.fn);
    if (fg_product != 0 && bg_product != 0) {
        const long double num = static_cast<long double>(c.tp) * c.tn - static_cast<long double>(c.fp) * c.fn;
        m.mcc = static_cast<double>(num / std::sqrt(static_cast<long double>(fg_product) * bg_product));
    }

    // Cohen's kappa as (x*(tp+tn) - E) / (x^2 - E) with E = x^2 * expected agreement.
    const auto expected = static_cast<std::int64_t>((c.tp + c.fn) * (c.tp + c.fp) + (c.tn + c.fp) * (c.tn + c.fn));
    const auto x2 = static_cast<std::int64_t>(c.x * c.x);
    if (x2 != expected) {
        const auto observed = static_cast<std::int64_t>(c.x * (c.tp + c.tn));
        m.cks = static_cast<double>(observed - expected) / static_cast<double>(x2 - expected);
    }

    const std::uint64_t mismatch = c.fp + c.fn;
    if (c.tp == 0) {
        m.pbd = mismatch == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        m.pbd = static_cast<double>(mismatch) / (2.0 * static_cast<double>(c.tp));
    }

    m.ari = adjusted_rand_index(c, ari);
    return m;
}

MetricValue VoxelMetricSet::get(std::string_view name) const {
    const auto all = values();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return all[i];
    }
    return std::nullopt;
}

bool VoxelMetricSet::has_metric(std::string_view name) {
    return std::find(names.begin(), names.end(), name) != names.end();
}

VoxelMetricSet voxel_metric_set(const ConfusionCounts& c, AriVariant ari) {
    const OverlapMetrics o = overlap_metrics(c);
    const VolumeMetrics v = volume_metrics(c);
    const InformationMetrics i = information_metrics(c);
    const ProbabilisticMetrics p = probabilistic_metrics(c, ari);
    VoxelMetricSet s;
    s.tpr = o.tpr;
    s.tnr = o.tnr;
    s.fpr = o.fpr;
    s.fnr = o.fnr;
    s.ppv = o.ppv;
    s.dice = o.dice;
    s.jaccard = o.jaccard;
    s.iou = o.iou;
    s.gce = o.gce;
    s.auc = p.auc;
    s.mcc = p.mcc;
    s.cks = p.cks;
    s.nmi = i.nmi;
    s.voi = i.voi;
    s.pbd = p.pbd;
    s.ari = p.ari;
    s.vs = v.vs;
    s.ravd = v.ravd;
    return s;
}

VoxelMetricSet voxel_metric_set(const BinaryMask& gt, const BinaryMask& pred, AriVariant ari) {
    return voxel_metric_set(confusion_counts(gt, pred), ari);
}

}  // namespace segeval
