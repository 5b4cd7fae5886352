#include "pcc/metrics.hpp"

#include <cmath>

namespace pcc::metrics {

namespace {

void require_nonempty(const PointCloud& c, const char* who) {
    if (c.empty()) throw EmptyCloudError(std::string(who) + ": empty cloud");
}

/// One directed Chamfer term: mean over `from` of the per-pair distance to its
/// nearest neighbor in `to`. Accumulation runs in index order so the result
/// is bit-reproducible and matches the brute-force oracle exactly.
double directed_term(const PointCloud& from, const NnIndex& to_index, ChamferNorm norm) {
    double sum = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        const Vec3& x = from.points[i];
        const NnIndex::Hit hit = to_index.nearest(x);
        if (norm == ChamferNorm::l2) {
            sum += hit.dist2;
        } else {
            sum += l1_norm(x - to_index.point(hit.index));
        }
    }
    return sum / static_cast<double>(from.size());
}

/// L1-selected variant: nearest neighbor chosen by L1 distance (lowest index
/// on ties), evaluated by linear scan.
double directed_term_l1_select(const PointCloud& from, const PointCloud& to) {
    double sum = 0.0;
    for (const Vec3& x : from.points) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec3& y : to.points) {
            const double d = l1_norm(x - y);
            if (d < best) best = d;
        }
        sum += best;
    }
    return sum / static_cast<double>(from.size());
}

}  // namespace

double chamfer(const PointCloud& pred, const PointCloud& gt, ChamferNorm norm, NnSelect select) {
    require_nonempty(pred, "chamfer");
    require_nonempty(gt, "chamfer");
    if (select == NnSelect::l1 && norm == ChamferNorm::l1) {
        return directed_term_l1_select(pred, gt) + directed_term_l1_select(gt, pred);
    }
    const NnIndex pred_index(pred);
    const NnIndex gt_index(gt);
    return directed_term(pred, gt_index, norm) + directed_term(gt, pred_index, norm);
}

double fscore(const PointCloud& pred, const PointCloud& gt, double delta) {
    require_nonempty(pred, "fscore");
    require_nonempty(gt, "fscore");
    if (!(delta > 0.0)) throw InvalidArgument("fscore: delta must be > 0");

    const NnIndex pred_index(pred);
    const NnIndex gt_index(gt);
    std::size_t hit_pred = 0;
    for (const Vec3& p : pred.points) {
        if (gt_index.nearest(p).dist < delta) ++hit_pred;
    }
    std::size_t hit_gt = 0;
    for (const Vec3& g : gt.points) {
        if (pred_index.nearest(g).dist < delta) ++hit_gt;
    }
    const double precision = static_cast<double>(hit_pred) / static_cast<double>(pred.size());
    const double recall = static_cast<double>(hit_gt) / static_cast<double>(gt.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double fidelity(const PointCloud& input, const PointCloud& output) {
    require_nonempty(input, "fidelity");
    require_nonempty(output, "fidelity");
    const NnIndex output_index(output);
    double sum = 0.0;
    for (std::size_t i = 0; i < input.size(); ++i) {
        sum += output_index.nearest(input.points[i]).dist;
    }
    return sum / static_cast<double>(input.size());
}

MetricValue evaluate(const PointCloud& pred, const PointCloud& gt, double delta,
                     const PointCloud* input) {
    MetricValue v;
    v.cd_l1 = chamfer(pred, gt, ChamferNorm::l1);
    v.cd_l2 = chamfer(pred, gt, ChamferNorm::l2);
    v.fscore = fscore(pred, gt, delta);
    v.delta = delta;
    if (input != nullptr) v.fidelity = fidelity(*input, pred);
    return v;
}

}  // namespace pcc::metrics
