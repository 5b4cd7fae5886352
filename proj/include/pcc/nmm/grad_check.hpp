#pragma once

#include <string>
#include <vector>

#include "pcc/nmm/losses.hpp"
#include "pcc/nmm/model.hpp"

namespace pcc::nmm {

/// One forward evaluation of the loss pipeline: run the paths, normalize the
/// features, and compute the contrastive losses (completion handled by the
/// trainer). Exposes the caches the backward pass needs.
struct LossEval {
    ForwardCtx ctx;
    Tensor3 f_cpgt_n, f_clean_n, f_noisy_n;
    double l_pos = 0.0;
    double l_neg = 0.0;
    double l_nmm = 0.0;
    double sim_clean_gt = 0.0;
    double sim_clean_noisy = 0.0;
};

LossEval eval_losses(const NmmModel& model, const Tensor3& f_i, const Tensor3& f_cpgt,
                     bool with_merge = false);

/// Accumulates d l_nmm into the model's parameter gradients. extra_d_clean /
/// extra_d_noisy / d_merged let the caller add upstream gradients (e.g. the
/// completion loss through the merge projection).
void backprop_losses(NmmModel& model, const LossEval& eval, const Tensor3* d_merged = nullptr);

struct GradCheckEntry {
    std::string tensor;
    double max_rel_err = 0.0;
    double max_abs_diff = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double worst_rel_err = 0.0;
    bool passed(double threshold = 1e-4) const { return worst_rel_err < threshold; }
};

/// Central finite differences of l_nmm against the analytic gradients for
/// every active parameter tensor. Deterministic given the model state.
GradCheckReport grad_check(NmmModel& model, const Tensor3& f_i, const Tensor3& f_cpgt,
                           double h = 1e-5);

}  // namespace pcc::nmm
