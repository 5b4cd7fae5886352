#include "pcc/nmm/losses.hpp"

#include <cmath>
#include <limits>

namespace pcc::nmm {

double positive_loss(const Tensor3& f_clean_n, const Tensor3& f_cpgt_n) {
    if (!f_clean_n.same_shape(f_cpgt_n)) throw InvalidArgument("positive_loss: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < f_clean_n.v.size(); ++i) sum += f_clean_n.v[i] * f_cpgt_n.v[i];
    return -sum / static_cast<double>(f_clean_n.positions());
}

Tensor3 positive_loss_backward(const Tensor3& f_cpgt_n) {
    Tensor3 g = f_cpgt_n;
    const double s = -1.0 / static_cast<double>(f_cpgt_n.positions());
    for (double& v : g.v) v *= s;
    return g;
}

double mean_cosine(const Tensor3& a_n, const Tensor3& b_n) {
    return -positive_loss(a_n, b_n);
}

namespace {

/// Pairwise similarity matrix s[i*M + j] = <c_i, n_j> over flattened positions.
std::vector<double> pairwise_sims(const Tensor3& c, const Tensor3& n) {
    const int m = c.positions();
    const int d = c.d;
    std::vector<double> sims(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
        const double* ci = c.v.data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < m; ++j) {
            const double* nj = n.v.data() + static_cast<std::size_t>(j) * d;
            double s = 0.0;
            for (int t = 0; t < d; ++t) s += ci[t] * nj[t];
            sims[static_cast<std::size_t>(i) * m + j] = s;
        }
    }
    return sims;
}

void check_neg_inputs(const Tensor3& c, const Tensor3& n, double t) {
    if (!c.same_shape(n)) throw InvalidArgument("negative_loss: shape mismatch");
    if (c.positions() < 2) throw InvalidArgument("negative_loss: needs B*L >= 2");
    if (!(t > 0.0)) throw InvalidArgument("negative_loss: temperature must be > 0");
}

}  // namespace

double negative_loss(const Tensor3& f_clean_n, const Tensor3& f_noisy_n, double t) {
    check_neg_inputs(f_clean_n, f_noisy_n, t);
    const int m = f_clean_n.positions();
    const std::vector<double> sims = pairwise_sims(f_clean_n, f_noisy_n);

    double max_z = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            max_z = std::max(max_z, sims[static_cast<std::size_t>(i) * m + j] / t);
        }
    }
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            acc += std::exp(sims[static_cast<std::size_t>(i) * m + j] / t - max_z);
        }
    }
    return t * (max_z + std::log(acc));
}

void negative_loss_backward(const Tensor3& f_clean_n, const Tensor3& f_noisy_n, double t,
                            Tensor3& d_clean_n, Tensor3& d_noisy_n) {
    check_neg_inputs(f_clean_n, f_noisy_n, t);
    const int m = f_clean_n.positions();
    const int d = f_clean_n.d;
    const std::vector<double> sims = pairwise_sims(f_clean_n, f_noisy_n);

    double max_z = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            max_z = std::max(max_z, sims[static_cast<std::size_t>(i) * m + j] / t);
        }
    }
    double denom = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            denom += std::exp(sims[static_cast<std::size_t>(i) * m + j] / t - max_z);
        }
    }

    d_clean_n = Tensor3(f_clean_n.b, f_clean_n.l, d);
    d_noisy_n = Tensor3(f_noisy_n.b, f_noisy_n.l, d);
    for (int i = 0; i < m; ++i) {
        const double* ci = f_clean_n.v.data() + static_cast<std::size_t>(i) * d;
        double* dci = d_clean_n.v.data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            // d l / d s_ij is the softmax weight of that pair.
            const double w = std::exp(sims[static_cast<std::size_t>(i) * m + j] / t - max_z) / denom;
            const double* nj = f_noisy_n.v.data() + static_cast<std::size_t>(j) * d;
            double* dnj = d_noisy_n.v.data() + static_cast<std::size_t>(j) * d;
            for (int k = 0; k < d; ++k) {
                dci[k] += w * nj[k];
                dnj[k] += w * ci[k];
            }
        }
    }
}

}  // namespace pcc::nmm
