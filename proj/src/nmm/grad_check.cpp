#include "pcc/nmm/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace pcc::nmm {

LossEval eval_losses(const NmmModel& model, const Tensor3& f_i, const Tensor3& f_cpgt,
                     bool with_merge) {
    if (!f_i.same_shape(f_cpgt)) throw InvalidArgument("eval_losses: f_i/f_cpgt shape mismatch");
    LossEval eval;
    eval.ctx = model.forward(f_i, with_merge);
    eval.f_cpgt_n = normalize_rows(f_cpgt);
    eval.f_clean_n = normalize_rows(eval.ctx.f_clean);
    eval.f_noisy_n = normalize_rows(eval.ctx.f_noisy);
    eval.l_pos = positive_loss(eval.f_clean_n, eval.f_cpgt_n);
    eval.l_neg = negative_loss(eval.f_clean_n, eval.f_noisy_n, model.config().t);
    eval.l_nmm = nmm_loss(eval.l_pos, eval.l_neg);
    eval.sim_clean_gt = mean_cosine(eval.f_clean_n, eval.f_cpgt_n);
    eval.sim_clean_noisy = mean_cosine(eval.f_clean_n, eval.f_noisy_n);
    return eval;
}

void backprop_losses(NmmModel& model, const LossEval& eval, const Tensor3* d_merged) {
    Tensor3 d_clean_n = positive_loss_backward(eval.f_cpgt_n);
    Tensor3 d_neg_clean, d_neg_noisy;
    negative_loss_backward(eval.f_clean_n, eval.f_noisy_n, model.config().t, d_neg_clean,
                           d_neg_noisy);
    accumulate(d_clean_n, d_neg_clean);

    Tensor3 d_clean_raw =
        normalize_rows_backward(eval.ctx.f_clean, eval.f_clean_n, d_clean_n);
    Tensor3 d_noisy_raw =
        normalize_rows_backward(eval.ctx.f_noisy, eval.f_noisy_n, d_neg_noisy);
    model.backward(eval.ctx, std::move(d_clean_raw), std::move(d_noisy_raw), d_merged);
}

GradCheckReport grad_check(NmmModel& model, const Tensor3& f_i, const Tensor3& f_cpgt, double h) {
    model.params().zero_grad();
    const LossEval eval = eval_losses(model, f_i, f_cpgt, false);
    backprop_losses(model, eval);

    const auto loss_at = [&]() {
        return eval_losses(model, f_i, f_cpgt, false).l_nmm;
    };

    GradCheckReport report;
    for (Param* p : model.params().active(model.config())) {
        GradCheckEntry entry;
        entry.tensor = p->name;
        for (std::size_t i = 0; i < p->w.size(); ++i) {
            const double saved = p->w[i];
            p->w[i] = saved + h;
            const double plus = loss_at();
            p->w[i] = saved - h;
            const double minus = loss_at();
            p->w[i] = saved;
            const double fd = (plus - minus) / (2.0 * h);
            const double analytic = p->g[i];
            const double denom = std::max({std::abs(fd), std::abs(analytic), 1e-6});
            entry.max_rel_err = std::max(entry.max_rel_err, std::abs(fd - analytic) / denom);
            entry.max_abs_diff = std::max(entry.max_abs_diff, std::abs(fd - analytic));
        }
        report.worst_rel_err = std::max(report.worst_rel_err, entry.max_rel_err);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace pcc::nmm
