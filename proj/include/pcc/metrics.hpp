#pragma once

#include <optional>

#include "pcc/nn_index.hpp"
#include "pcc/point_cloud.hpp"

namespace pcc::metrics {

enum class ChamferNorm { l1, l2 };

/// How the nearest neighbor is selected for CD-L1. The accumulated per-pair
/// distance is always the L1 norm for CD-L1; selection defaults to Euclidean.
enum class NnSelect { euclidean, l1 };

/// Symmetric Chamfer distance: mean nearest-neighbor term in each direction,
/// summed. CD-L1 accumulates the L1 norm of the difference vector, CD-L2 the
/// squared Euclidean distance. Raw value; the report layer applies x1000.
double chamfer(const PointCloud& pred, const PointCloud& gt, ChamferNorm norm,
               NnSelect select = NnSelect::euclidean);

/// F-score at threshold delta: harmonic mean of precision G (fraction of pred
/// points with NN distance to gt < delta) and recall H (gt -> pred); 0 when
/// G + H == 0. Requires delta > 0.
double fscore(const PointCloud& pred, const PointCloud& gt, double delta);

/// Mean distance from each input point to its nearest output point.
double fidelity(const PointCloud& input, const PointCloud& output);

/// Per-cloud metric bundle. CD and fidelity are raw (unscaled) here.
struct MetricValue {
    double cd_l1 = 0.0;
    double cd_l2 = 0.0;
    double fscore = 0.0;
    std::optional<double> fidelity;
    double delta = 0.01;
};

/// Evaluate all metrics for one (pred, gt[, input]) triplet.
MetricValue evaluate(const PointCloud& pred, const PointCloud& gt, double delta,
                     const PointCloud* input = nullptr);

}  // namespace pcc::metrics
