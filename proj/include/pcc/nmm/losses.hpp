#pragma once

#include "pcc/nmm/tensor.hpp"

namespace pcc::nmm {

/// Mean cosine alignment loss: -(1/(B*L)) sum over positions of
/// <f_clean, f_cpgt>. Inputs must already be normalized per vector.
double positive_loss(const Tensor3& f_clean_n, const Tensor3& f_cpgt_n);
/// d l_pos / d f_clean_n.
Tensor3 positive_loss_backward(const Tensor3& f_cpgt_n);

/// Mean per-position cosine similarity (the positive loss negated); also used
/// to report sim(f_clean, f_noisy) on the diagonal pairs.
double mean_cosine(const Tensor3& a_n, const Tensor3& b_n);

/// Contrastive repulsion over all M x M clean/noisy pairs excluding the
/// diagonal (M = B*L): t * log sum_{i != j} exp(<c_i, n_j> / t), evaluated
/// with a max-subtracted log-sum-exp. Requires M >= 2 and t > 0.
double negative_loss(const Tensor3& f_clean_n, const Tensor3& f_noisy_n, double t);
/// Gradients w.r.t. both normalized inputs.
void negative_loss_backward(const Tensor3& f_clean_n, const Tensor3& f_noisy_n, double t,
                            Tensor3& d_clean_n, Tensor3& d_noisy_n);

struct LossBreakdown {
    double l_pos = 0.0;
    double l_neg = 0.0;
    double l_nmm = 0.0;
    double l_completion = 0.0;
    double l_total = 0.0;
};

inline double nmm_loss(double l_pos, double l_neg) { return l_pos + l_neg; }
inline double total_loss(double l_completion, double l_nmm) { return l_completion + l_nmm; }

inline LossBreakdown make_breakdown(double l_pos, double l_neg, double l_completion) {
    LossBreakdown b;
    b.l_pos = l_pos;
    b.l_neg = l_neg;
    b.l_nmm = nmm_loss(l_pos, l_neg);
    b.l_completion = l_completion;
    b.l_total = total_loss(l_completion, b.l_nmm);
    return b;
}

}  // namespace pcc::nmm
