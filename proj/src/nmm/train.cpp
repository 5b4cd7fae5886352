#include "pcc/nmm/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace pcc::nmm {

namespace {

constexpr int kRank = 4;
constexpr double kNoiseScale = 0.7;

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

struct ToyData {
    Tensor3 f_i, f_cpgt;
    Tensor3 target;  // B x L x 3 completion target points
};

ToyData make_toy_data(const NmmConfig& config, std::uint64_t seed) {
    RngStream rng(seed, "train_toy", "data");
    const int d = config.d;

    std::vector<double> clean_basis(static_cast<std::size_t>(kRank) * d);
    std::vector<double> noise_basis(static_cast<std::size_t>(kRank) * d);
    for (double& v : clean_basis) v = rng.normal();
    for (double& v : noise_basis) v = rng.normal();

    ToyData data;
    data.f_cpgt = Tensor3(config.b, config.l, d);
    data.f_i = Tensor3(config.b, config.l, d);
    data.target = Tensor3(config.b, config.l, 3);
    const double inv_sqrt_rank = 1.0 / std::sqrt(static_cast<double>(kRank));
    for (int bi = 0; bi < config.b; ++bi) {
        for (int li = 0; li < config.l; ++li) {
            double* clean = data.f_cpgt.row(bi, li);
            double* noisy = data.f_i.row(bi, li);
            for (int r = 0; r < kRank; ++r) {
                const double z = rng.normal();
                const double* u = clean_basis.data() + static_cast<std::size_t>(r) * d;
                for (int di = 0; di < d; ++di) clean[di] += z * u[di] * inv_sqrt_rank;
            }
            for (int di = 0; di < d; ++di) noisy[di] = clean[di];
            for (int r = 0; r < kRank; ++r) {
                const double w = rng.normal() * kNoiseScale;
                const double* v = noise_basis.data() + static_cast<std::size_t>(r) * d;
                for (int di = 0; di < d; ++di) noisy[di] += w * v[di] * inv_sqrt_rank;
            }
            double* t = data.target.row(bi, li);
            for (int di = 0; di < 3 && di < d; ++di) t[di] = clean[di];
        }
    }
    return data;
}

/// CD-L1 between the decoded batch-row and its target (L1-norm
/// accumulation, Euclidean selection, lowest index on ties), with the fixed-
/// assignment subgradient accumulated into d_pred.
double chamfer_l1_row(const Tensor3& pred, const Tensor3& target, int bi, Tensor3& d_pred) {
    const int l = pred.l;
    double loss = 0.0;
    const double inv_l = 1.0 / static_cast<double>(l);

    for (int i = 0; i < l; ++i) {
        const double* p = pred.row(bi, i);
        int best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int j = 0; j < l; ++j) {
            const double* t = target.row(bi, j);
            double d2 = 0.0;
            for (int k = 0; k < 3; ++k) d2 += (p[k] - t[k]) * (p[k] - t[k]);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = j;
            }
        }
        const double* t = target.row(bi, best);
        double* g = d_pred.row(bi, i);
        for (int k = 0; k < 3; ++k) {
            loss += std::abs(p[k] - t[k]) * inv_l;
            g[k] += sign(p[k] - t[k]) * inv_l;
        }
    }
    for (int j = 0; j < l; ++j) {
        const double* t = target.row(bi, j);
        int best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int i = 0; i < l; ++i) {
            const double* p = pred.row(bi, i);
            double d2 = 0.0;
            for (int k = 0; k < 3; ++k) d2 += (t[k] - p[k]) * (t[k] - p[k]);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = i;
            }
        }
        const double* p = pred.row(bi, best);
        double* g = d_pred.row(bi, best);
        for (int k = 0; k < 3; ++k) {
            loss += std::abs(t[k] - p[k]) * inv_l;
            g[k] += sign(p[k] - t[k]) * inv_l;
        }
    }
    return loss;
}

}  // namespace

double TrainResult::final_gap() const {
    if (history.empty()) return 0.0;
    const TrainRecord& last = history.back();
    return last.sim_clean_gt - last.sim_clean_noisy;
}

TrainResult train_toy(const NmmConfig& config, std::uint64_t seed, int steps, double lr) {
    if (steps < 1) throw InvalidArgument("train_toy: steps must be >= 1");
    config.validate();

    NmmModel model(config, seed);
    const ToyData data = make_toy_data(config, seed);

    // Linear toy decoder: f_merged (D) -> 3D point per position.
    Param dec_w("dec_w", 3, config.d);
    Param dec_b("dec_b", 3, 1);
    {
        RngStream rng(seed, "train_toy", "decoder");
        const double a = std::sqrt(6.0 / static_cast<double>(config.d + 3));
        for (double& w : dec_w.w) w = rng.uniform(-a, a);
    }

    TrainResult result;
    result.history.reserve(static_cast<std::size_t>(steps));
    const double inv_b = 1.0 / static_cast<double>(config.b);

    for (int step = 0; step < steps; ++step) {
        model.params().zero_grad();
        dec_w.zero_grad();
        dec_b.zero_grad();

        LossEval eval = eval_losses(model, data.f_i, data.f_cpgt, /*with_merge=*/true);

        // Decode merged features to points.
        Tensor3 pred(config.b, config.l, 3);
        for (int bi = 0; bi < config.b; ++bi) {
            for (int li = 0; li < config.l; ++li) {
                const double* f = eval.ctx.f_merged.row(bi, li);
                double* p = pred.row(bi, li);
                for (int o = 0; o < 3; ++o) {
                    double acc = dec_b.w[o];
                    const double* w = dec_w.w.data() + static_cast<std::size_t>(o) * config.d;
                    for (int i = 0; i < config.d; ++i) acc += w[i] * f[i];
                    p[o] = acc;
                }
            }
        }

        Tensor3 d_pred(config.b, config.l, 3);
        double l_completion = 0.0;
        for (int bi = 0; bi < config.b; ++bi)
            l_completion += chamfer_l1_row(pred, data.target, bi, d_pred);
        l_completion *= inv_b;
        for (double& g : d_pred.v) g *= inv_b;

        TrainRecord record;
        record.step = step;
        record.losses = make_breakdown(eval.l_pos, eval.l_neg, l_completion);
        record.sim_clean_gt = eval.sim_clean_gt;
        record.sim_clean_noisy = eval.sim_clean_noisy;
        result.history.push_back(record);
        if (!std::isfinite(record.losses.l_total))
            throw DivergedError("train_toy: non-finite loss", step);

        // Decoder backward -> d f_merged.
        Tensor3 d_merged(config.b, config.l, config.d);
        for (int bi = 0; bi < config.b; ++bi) {
            for (int li = 0; li < config.l; ++li) {
                const double* f = eval.ctx.f_merged.row(bi, li);
                const double* gp = d_pred.row(bi, li);
                double* gm = d_merged.row(bi, li);
                for (int o = 0; o < 3; ++o) {
                    dec_b.g[o] += gp[o];
                    const double* w = dec_w.w.data() + static_cast<std::size_t>(o) * config.d;
                    double* gw = dec_w.g.data() + static_cast<std::size_t>(o) * config.d;
                    for (int i = 0; i < config.d; ++i) {
                        gw[i] += gp[o] * f[i];
                        gm[i] += gp[o] * w[i];
                    }
                }
            }
        }

        backprop_losses(model, eval, &d_merged);
        model.sgd_step(lr);
        for (std::size_t i = 0; i < dec_w.w.size(); ++i) dec_w.w[i] -= lr * dec_w.g[i];
        for (std::size_t i = 0; i < dec_b.w.size(); ++i) dec_b.w[i] -= lr * dec_b.g[i];
    }
    return result;
}

void write_history_csv(std::ostream& out, const TrainResult& result) {
    out << "step,l_pos,l_neg,l_nmm,l_completion,l_total,sim_clean_gt,sim_clean_noisy\n";
    char line[256];
    for (const TrainRecord& r : result.history) {
        std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.step,
                      r.losses.l_pos, r.losses.l_neg, r.losses.l_nmm, r.losses.l_completion,
                      r.losses.l_total, r.sim_clean_gt, r.sim_clean_noisy);
        out << line;
    }
}

}  // namespace pcc::nmm
