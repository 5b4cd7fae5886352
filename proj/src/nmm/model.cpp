#include "pcc/nmm/model.hpp"

#include <cmath>

namespace pcc::nmm {

namespace {

/// y[b,l,o] = sum_i W[o,i] x[b,l,i] (+ bias[o])
Tensor3 linear(const Tensor3& x, const Param& w, const Param* bias) {
    if (w.cols != x.d) throw InvalidArgument("linear: weight shape mismatch");
    Tensor3 y(x.b, x.l, w.rows);
    for (int bi = 0; bi < x.b; ++bi) {
        for (int li = 0; li < x.l; ++li) {
            const double* xi = x.row(bi, li);
            double* yi = y.row(bi, li);
            for (int o = 0; o < w.rows; ++o) {
                double acc = bias != nullptr ? bias->w[o] : 0.0;
                const double* wo = w.w.data() + static_cast<std::size_t>(o) * w.cols;
                for (int i = 0; i < w.cols; ++i) acc += wo[i] * xi[i];
                yi[o] = acc;
            }
        }
    }
    return y;
}

Tensor3 linear_backward(const Tensor3& x, const Tensor3& gy, Param& w, Param* bias) {
    Tensor3 gx(x.b, x.l, x.d);
    for (int bi = 0; bi < x.b; ++bi) {
        for (int li = 0; li < x.l; ++li) {
            const double* xi = x.row(bi, li);
            const double* gi = gy.row(bi, li);
            double* oi = gx.row(bi, li);
            for (int o = 0; o < w.rows; ++o) {
                const double g = gi[o];
                if (bias != nullptr) bias->g[o] += g;
                const double* wo = w.w.data() + static_cast<std::size_t>(o) * w.cols;
                double* go = w.g.data() + static_cast<std::size_t>(o) * w.cols;
                for (int i = 0; i < w.cols; ++i) {
                    go[i] += g * xi[i];
                    oi[i] += g * wo[i];
                }
            }
        }
    }
    return gx;
}

Tensor3 relu(const Tensor3& x) {
    Tensor3 y = x;
    for (double& v : y.v) v = v > 0.0 ? v : 0.0;
    return y;
}

Tensor3 relu_backward(const Tensor3& pre, const Tensor3& gy) {
    Tensor3 gx = gy;
    for (std::size_t i = 0; i < gx.v.size(); ++i) {
        if (pre.v[i] <= 0.0) gx.v[i] = 0.0;
    }
    return gx;
}

/// Same-padded 1D convolution along L mixing all D channels.
Tensor3 conv1d(const Tensor3& x, const Param& w, const Param& bias) {
    const int k = w.taps;
    const int off = k / 2;
    Tensor3 y(x.b, x.l, w.rows);
    for (int bi = 0; bi < x.b; ++bi) {
        for (int li = 0; li < x.l; ++li) {
            double* yi = y.row(bi, li);
            for (int o = 0; o < w.rows; ++o) yi[o] = bias.w[o];
            for (int t = 0; t < k; ++t) {
                const int src = li + t - off;
                if (src < 0 || src >= x.l) continue;
                const double* xi = x.row(bi, src);
                for (int o = 0; o < w.rows; ++o) {
                    const double* wo = w.w.data() + (static_cast<std::size_t>(o) * w.cols) * k + t;
                    double acc = 0.0;
                    for (int i = 0; i < w.cols; ++i) acc += wo[static_cast<std::size_t>(i) * k] * xi[i];
                    yi[o] += acc;
                }
            }
        }
    }
    return y;
}

void conv1d_backward(const Tensor3& x, const Tensor3& gy, Param& w, Param& bias, Tensor3& gx) {
    const int k = w.taps;
    const int off = k / 2;
    for (int bi = 0; bi < x.b; ++bi) {
        for (int li = 0; li < x.l; ++li) {
            const double* gi = gy.row(bi, li);
            for (int o = 0; o < w.rows; ++o) bias.g[o] += gi[o];
            for (int t = 0; t < k; ++t) {
                const int src = li + t - off;
                if (src < 0 || src >= x.l) continue;
                const double* xi = x.row(bi, src);
                double* gxi = gx.row(bi, src);
                for (int o = 0; o < w.rows; ++o) {
                    const double g = gi[o];
                    const std::size_t base = (static_cast<std::size_t>(o) * w.cols) * k + t;
                    for (int i = 0; i < w.cols; ++i) {
                        w.g[base + static_cast<std::size_t>(i) * k] += g * xi[i];
                        gxi[i] += g * w.w[base + static_cast<std::size_t>(i) * k];
                    }
                }
            }
        }
    }
}

Tensor3 concat_d(const Tensor3& a, const Tensor3& b) {
    Tensor3 out(a.b, a.l, a.d + b.d);
    for (int bi = 0; bi < a.b; ++bi) {
        for (int li = 0; li < a.l; ++li) {
            double* oi = out.row(bi, li);
            const double* ai = a.row(bi, li);
            const double* bi_ = b.row(bi, li);
            for (int i = 0; i < a.d; ++i) oi[i] = ai[i];
            for (int i = 0; i < b.d; ++i) oi[a.d + i] = bi_[i];
        }
    }
    return out;
}

void split_d(const Tensor3& cat, Tensor3& a, Tensor3& b) {
    for (int bi = 0; bi < cat.b; ++bi) {
        for (int li = 0; li < cat.l; ++li) {
            const double* ci = cat.row(bi, li);
            double* ai = a.row(bi, li);
            double* bi_ = b.row(bi, li);
            for (int i = 0; i < a.d; ++i) ai[i] += ci[i];
            for (int i = 0; i < b.d; ++i) bi_[i] += ci[a.d + i];
        }
    }
}

void xavier_init(Param& p, int fan_in, int fan_out, RngStream& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& w : p.w) w = rng.uniform(-a, a);
}

}  // namespace

std::string_view ablation_name(Ablation a) {
    switch (a) {
        case Ablation::none: return "none";
        case Ablation::clean_only: return "clean-only";
        case Ablation::noisy_only: return "noisy-only";
        case Ablation::no_attention: return "no-attention";
        case Ablation::single_scale: return "single-scale";
    }
    return "unknown";
}

std::optional<Ablation> ablation_from_name(std::string_view name) {
    for (Ablation a : {Ablation::none, Ablation::clean_only, Ablation::noisy_only,
                       Ablation::no_attention, Ablation::single_scale}) {
        if (ablation_name(a) == name) return a;
    }
    return std::nullopt;
}

void NmmConfig::validate() const {
    if (b < 1 || l < 1 || d < 1) throw InvalidArgument("NmmConfig: b, l, d must be >= 1");
    if (heads < 1 || d % heads != 0)
        throw InvalidArgument("NmmConfig: d must be divisible by heads");
    if (!(t > 0.0)) throw InvalidArgument("NmmConfig: temperature must be > 0");
}

std::vector<Param*> NmmParams::all() {
    return {&wq,      &bq,      &wk,      &bk,      &wv,      &bv,      &wo,      &bo,
            &ln1_gain, &ln1_bias, &ln2_gain, &ln2_bias, &ffn_w1,  &ffn_b1,  &ffn_w2,  &ffn_b2,
            &mlp_w,   &mlp_b,   &conv1_w, &conv1_b, &conv3_w, &conv3_b, &conv5_w, &conv5_b,
            &merge_w, &proj_w,  &proj_b};
}

std::vector<Param*> NmmParams::active(const NmmConfig& config) {
    std::vector<Param*> out;
    const bool clean = config.ablation != Ablation::noisy_only;
    const bool noisy = config.ablation != Ablation::clean_only;
    if (clean) {
        if (config.ablation == Ablation::no_attention) {
            out.insert(out.end(), {&mlp_w, &mlp_b});
        } else {
            out.insert(out.end(), {&wq, &bq, &wk, &bk, &wv, &bv, &wo, &bo});
        }
        out.insert(out.end(),
                   {&ln1_gain, &ln1_bias, &ln2_gain, &ln2_bias, &ffn_w1, &ffn_b1, &ffn_w2, &ffn_b2});
    }
    if (noisy) {
        if (config.ablation == Ablation::single_scale) {
            out.insert(out.end(), {&conv3_w, &conv3_b});
        } else {
            out.insert(out.end(), {&conv1_w, &conv1_b, &conv3_w, &conv3_b, &conv5_w, &conv5_b});
        }
        out.push_back(&merge_w);
    }
    out.insert(out.end(), {&proj_w, &proj_b});
    return out;
}

void NmmParams::zero_grad() {
    for (Param* p : all()) p->zero_grad();
}

NmmModel::NmmModel(const NmmConfig& config, std::uint64_t init_seed) : config_(config) {
    config_.validate();
    const int d = config_.d;
    const int hidden = 4 * d;
    const int merge_in = config_.ablation == Ablation::single_scale ? d : 3 * d;

    params_.wq = Param("wq", d, d);
    params_.bq = Param("bq", d, 1);
    params_.wk = Param("wk", d, d);
    params_.bk = Param("bk", d, 1);
    params_.wv = Param("wv", d, d);
    params_.bv = Param("bv", d, 1);
    params_.wo = Param("wo", d, d);
    params_.bo = Param("bo", d, 1);
    params_.ln1_gain = Param("ln1_gain", d, 1);
    params_.ln1_bias = Param("ln1_bias", d, 1);
    params_.ln2_gain = Param("ln2_gain", d, 1);
    params_.ln2_bias = Param("ln2_bias", d, 1);
    params_.ffn_w1 = Param("ffn_w1", hidden, d);
    params_.ffn_b1 = Param("ffn_b1", hidden, 1);
    params_.ffn_w2 = Param("ffn_w2", d, hidden);
    params_.ffn_b2 = Param("ffn_b2", d, 1);
    params_.mlp_w = Param("mlp_w", d, d);
    params_.mlp_b = Param("mlp_b", d, 1);
    params_.conv1_w = Param("conv1_w", d, d, 1);
    params_.conv1_b = Param("conv1_b", d, 1);
    params_.conv3_w = Param("conv3_w", d, d, 3);
    params_.conv3_b = Param("conv3_b", d, 1);
    params_.conv5_w = Param("conv5_w", d, d, 5);
    params_.conv5_b = Param("conv5_b", d, 1);
    params_.merge_w = Param("merge_w", d, merge_in);
    params_.proj_w = Param("proj_w", d, 2 * d);
    params_.proj_b = Param("proj_b", d, 1);

    RngStream rng(init_seed, "nmm", "init");
    xavier_init(params_.wq, d, d, rng);
    xavier_init(params_.wk, d, d, rng);
    xavier_init(params_.wv, d, d, rng);
    xavier_init(params_.wo, d, d, rng);
    xavier_init(params_.ffn_w1, d, hidden, rng);
    xavier_init(params_.ffn_w2, hidden, d, rng);
    xavier_init(params_.mlp_w, d, d, rng);
    xavier_init(params_.conv1_w, d * 1, d * 1, rng);
    xavier_init(params_.conv3_w, d * 3, d * 3, rng);
    xavier_init(params_.conv5_w, d * 5, d * 5, rng);
    xavier_init(params_.merge_w, merge_in, d, rng);
    xavier_init(params_.proj_w, 2 * d, d, rng);
    for (double& g : params_.ln1_gain.w) g = 1.0;
    for (double& g : params_.ln2_gain.w) g = 1.0;
}

Tensor3 layer_norm(const Tensor3& x, const Param& gain, const Param& bias, double eps,
                   std::vector<double>* mu_cache, std::vector<double>* inv_cache) {
    if (gain.rows != x.d || bias.rows != x.d)
        throw InvalidArgument("layer_norm: gain/bias size mismatch");
    Tensor3 y(x.b, x.l, x.d);
    if (mu_cache != nullptr) mu_cache->assign(static_cast<std::size_t>(x.positions()), 0.0);
    if (inv_cache != nullptr) inv_cache->assign(static_cast<std::size_t>(x.positions()), 0.0);
    std::size_t pos = 0;
    for (int bi = 0; bi < x.b; ++bi) {
        for (int li = 0; li < x.l; ++li, ++pos) {
            const double* xi = x.row(bi, li);
            double* yi = y.row(bi, li);
            double mu = 0.0;
            for (int di = 0; di < x.d; ++di) mu += xi[di];
            mu /= x.d;
            double var = 0.0;
            for (int di = 0; di < x.d; ++di) var += (xi[di] - mu) * (xi[di] - mu);
            var /= x.d;
            const double inv = 1.0 / std::sqrt(var + eps);
            for (int di = 0; di < x.d; ++di)
                yi[di] = gain.w[di] * (xi[di] - mu) * inv + bias.w[di];
            if (mu_cache != nullptr) (*mu_cache)[pos] = mu;
            if (inv_cache != nullptr) (*inv_cache)[pos] = inv;
        }
    }
    return y;
}

Tensor3 layer_norm_backward(const Tensor3& x, const Tensor3& gy, const Param& gain,
                            const std::vector<double>& mu, const std::vector<double>& inv,
                            Param* gain_grad, Param* bias_grad) {
    Tensor3 gx(x.b, x.l, x.d);
    const int d = x.d;
    std::size_t pos = 0;
    for (int bi = 0; bi < x.b; ++bi) {
        for (int li = 0; li < x.l; ++li, ++pos) {
            const double* xi = x.row(bi, li);
            const double* gi = gy.row(bi, li);
            double* oi = gx.row(bi, li);
            const double m = mu[pos];
            const double is = inv[pos];
            double s1 = 0.0, s2 = 0.0;
            for (int di = 0; di < d; ++di) {
                const double xhat = (xi[di] - m) * is;
                const double dxhat = gi[di] * gain.w[di];
                s1 += dxhat;
                s2 += dxhat * xhat;
                if (gain_grad != nullptr) gain_grad->g[di] += gi[di] * xhat;
                if (bias_grad != nullptr) bias_grad->g[di] += gi[di];
            }
            for (int di = 0; di < d; ++di) {
                const double xhat = (xi[di] - m) * is;
                const double dxhat = gi[di] * gain.w[di];
                oi[di] = is * (dxhat - (s1 + xhat * s2) / d);
            }
        }
    }
    return gx;
}

Tensor3 mhsa(const Tensor3& x, const NmmParams& params, int heads, std::vector<double>* attn_out,
             Tensor3* q_out, Tensor3* k_out, Tensor3* v_out, Tensor3* ctx_out) {
    if (x.d % heads != 0) throw InvalidArgument("mhsa: d must be divisible by heads");
    const int dh = x.d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    const Tensor3 q = linear(x, params.wq, &params.bq);
    const Tensor3 k = linear(x, params.wk, &params.bk);
    const Tensor3 v = linear(x, params.wv, &params.bv);

    Tensor3 ctx(x.b, x.l, x.d);
    std::vector<double> attn(static_cast<std::size_t>(x.b) * heads * x.l * x.l, 0.0);
    std::vector<double> scores(static_cast<std::size_t>(x.l), 0.0);

    for (int bi = 0; bi < x.b; ++bi) {
        for (int h = 0; h < heads; ++h) {
            const int base = h * dh;
            for (int i = 0; i < x.l; ++i) {
                const double* qi = q.row(bi, i) + base;
                double max_s = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < x.l; ++j) {
                    const double* kj = k.row(bi, j) + base;
                    double s = 0.0;
                    for (int t = 0; t < dh; ++t) s += qi[t] * kj[t];
                    s *= scale;
                    scores[static_cast<std::size_t>(j)] = s;
                    max_s = std::max(max_s, s);
                }
                double denom = 0.0;
                for (int j = 0; j < x.l; ++j) {
                    scores[static_cast<std::size_t>(j)] =
                        std::exp(scores[static_cast<std::size_t>(j)] - max_s);
                    denom += scores[static_cast<std::size_t>(j)];
                }
                double* arow =
                    attn.data() + ((static_cast<std::size_t>(bi) * heads + h) * x.l + i) * x.l;
                double* ci = ctx.row(bi, i) + base;
                for (int j = 0; j < x.l; ++j) {
                    const double a = scores[static_cast<std::size_t>(j)] / denom;
                    arow[j] = a;
                    const double* vj = v.row(bi, j) + base;
                    for (int t = 0; t < dh; ++t) ci[t] += a * vj[t];
                }
            }
        }
    }

    Tensor3 y = linear(ctx, params.wo, &params.bo);
    if (attn_out != nullptr) *attn_out = std::move(attn);
    if (q_out != nullptr) *q_out = q;
    if (k_out != nullptr) *k_out = k;
    if (v_out != nullptr) *v_out = v;
    if (ctx_out != nullptr) *ctx_out = ctx;
    return y;
}

Tensor3 NmmModel::clean_path(const Tensor3& f_i, ForwardCtx& ctx) const {
    if (config_.ablation == Ablation::no_attention) {
        ctx.mlp_pre = linear(f_i, params_.mlp_w, &params_.mlp_b);
        ctx.mhsa_out = relu(ctx.mlp_pre);
    } else {
        ctx.mhsa_out =
            mhsa(f_i, params_, config_.heads, &ctx.attn, &ctx.q, &ctx.k, &ctx.v, &ctx.attn_ctx);
    }
    ctx.res1 = f_i + ctx.mhsa_out;
    ctx.h1 = layer_norm(ctx.res1, params_.ln1_gain, params_.ln1_bias, config_.ln_eps, &ctx.ln1_mu,
                        &ctx.ln1_inv);
    ctx.ffn_pre = linear(ctx.h1, params_.ffn_w1, &params_.ffn_b1);
    ctx.ffn_mid = relu(ctx.ffn_pre);
    ctx.res2 = ctx.h1 + linear(ctx.ffn_mid, params_.ffn_w2, &params_.ffn_b2);
    return layer_norm(ctx.res2, params_.ln2_gain, params_.ln2_bias, config_.ln_eps, &ctx.ln2_mu,
                      &ctx.ln2_inv);
}

Tensor3 NmmModel::noisy_path(const Tensor3& f_i, ForwardCtx& ctx) const {
    if (config_.ablation == Ablation::single_scale) {
        ctx.conv_cat = conv1d(f_i, params_.conv3_w, params_.conv3_b);
    } else {
        const Tensor3 c1 = conv1d(f_i, params_.conv1_w, params_.conv1_b);
        const Tensor3 c3 = conv1d(f_i, params_.conv3_w, params_.conv3_b);
        const Tensor3 c5 = conv1d(f_i, params_.conv5_w, params_.conv5_b);
        ctx.conv_cat = concat_d(concat_d(c1, c3), c5);
    }
    return linear(ctx.conv_cat, params_.merge_w, nullptr);
}

ForwardCtx NmmModel::forward(const Tensor3& f_i, bool with_merge) const {
    f_i.require_shape(config_.b, config_.l, config_.d, "NmmModel::forward");
    ForwardCtx ctx;
    ctx.f_i = f_i;

    switch (config_.ablation) {
        case Ablation::clean_only:
            ctx.f_clean = clean_path(f_i, ctx);
            ctx.f_noisy = Tensor3(f_i.b, f_i.l, f_i.d);  // zero tensor
            break;
        case Ablation::noisy_only:
            ctx.f_noisy = noisy_path(f_i, ctx);
            ctx.f_clean = f_i - ctx.f_noisy;
            break;
        default:
            ctx.f_clean = clean_path(f_i, ctx);
            ctx.f_noisy = noisy_path(f_i, ctx);
            break;
    }
    if (with_merge) {
        ctx.f_merged = linear(concat_d(ctx.f_clean, ctx.f_noisy), params_.proj_w, &params_.proj_b);
    }
    return ctx;
}

Tensor3 NmmModel::clean_path_backward(const ForwardCtx& ctx, const Tensor3& d_out) {
    Tensor3 d_res2 = layer_norm_backward(ctx.res2, d_out, params_.ln2_gain, ctx.ln2_mu,
                                         ctx.ln2_inv, &params_.ln2_gain, &params_.ln2_bias);
    // res2 = h1 + ffn(h1)
    Tensor3 d_h1 = d_res2;
    Tensor3 d_mid = linear_backward(ctx.ffn_mid, d_res2, params_.ffn_w2, &params_.ffn_b2);
    Tensor3 d_pre = relu_backward(ctx.ffn_pre, d_mid);
    accumulate(d_h1, linear_backward(ctx.h1, d_pre, params_.ffn_w1, &params_.ffn_b1));

    Tensor3 d_res1 = layer_norm_backward(ctx.res1, d_h1, params_.ln1_gain, ctx.ln1_mu, ctx.ln1_inv,
                                         &params_.ln1_gain, &params_.ln1_bias);
    // res1 = f_i + sublayer(f_i)
    Tensor3 d_fi = d_res1;
    if (config_.ablation == Ablation::no_attention) {
        Tensor3 d_mlp_pre = relu_backward(ctx.mlp_pre, d_res1);
        accumulate(d_fi, linear_backward(ctx.f_i, d_mlp_pre, params_.mlp_w, &params_.mlp_b));
        return d_fi;
    }

    // Attention backward.
    const int heads = config_.heads;
    const int dh = config_.d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    Tensor3 d_ctx = linear_backward(ctx.attn_ctx, d_res1, params_.wo, &params_.bo);
    Tensor3 d_q(ctx.f_i.b, ctx.f_i.l, ctx.f_i.d);
    Tensor3 d_k(ctx.f_i.b, ctx.f_i.l, ctx.f_i.d);
    Tensor3 d_v(ctx.f_i.b, ctx.f_i.l, ctx.f_i.d);
    std::vector<double> d_attn_row(static_cast<std::size_t>(ctx.f_i.l));

    for (int bi = 0; bi < ctx.f_i.b; ++bi) {
        for (int h = 0; h < heads; ++h) {
            const int base = h * dh;
            for (int i = 0; i < ctx.f_i.l; ++i) {
                const double* dci = d_ctx.row(bi, i) + base;
                const double* arow =
                    ctx.attn.data() +
                    ((static_cast<std::size_t>(bi) * heads + h) * ctx.f_i.l + i) * ctx.f_i.l;
                // dA_ij and dv_j
                double dot_da_a = 0.0;
                for (int j = 0; j < ctx.f_i.l; ++j) {
                    const double* vj = ctx.v.row(bi, j) + base;
                    double da = 0.0;
                    for (int t = 0; t < dh; ++t) da += dci[t] * vj[t];
                    d_attn_row[static_cast<std::size_t>(j)] = da;
                    dot_da_a += da * arow[j];
                    double* dvj = d_v.row(bi, j) + base;
                    for (int t = 0; t < dh; ++t) dvj[t] += arow[j] * dci[t];
                }
                // softmax jacobian, then q/k grads
                const double* qi = ctx.q.row(bi, i) + base;
                double* dqi = d_q.row(bi, i) + base;
                for (int j = 0; j < ctx.f_i.l; ++j) {
                    const double ds =
                        arow[j] * (d_attn_row[static_cast<std::size_t>(j)] - dot_da_a) * scale;
                    const double* kj = ctx.k.row(bi, j) + base;
                    double* dkj = d_k.row(bi, j) + base;
                    for (int t = 0; t < dh; ++t) {
                        dqi[t] += ds * kj[t];
                        dkj[t] += ds * qi[t];
                    }
                }
            }
        }
    }

    accumulate(d_fi, linear_backward(ctx.f_i, d_q, params_.wq, &params_.bq));
    accumulate(d_fi, linear_backward(ctx.f_i, d_k, params_.wk, &params_.bk));
    accumulate(d_fi, linear_backward(ctx.f_i, d_v, params_.wv, &params_.bv));
    return d_fi;
}

Tensor3 NmmModel::noisy_path_backward(const ForwardCtx& ctx, const Tensor3& d_out) {
    Tensor3 d_cat = linear_backward(ctx.conv_cat, d_out, params_.merge_w, nullptr);
    Tensor3 d_fi(ctx.f_i.b, ctx.f_i.l, ctx.f_i.d);
    if (config_.ablation == Ablation::single_scale) {
        conv1d_backward(ctx.f_i, d_cat, params_.conv3_w, params_.conv3_b, d_fi);
        return d_fi;
    }
    const int d = config_.d;
    Tensor3 d_c1(ctx.f_i.b, ctx.f_i.l, d), d_c3(ctx.f_i.b, ctx.f_i.l, d),
        d_c5(ctx.f_i.b, ctx.f_i.l, d);
    for (int bi = 0; bi < ctx.f_i.b; ++bi) {
        for (int li = 0; li < ctx.f_i.l; ++li) {
            const double* src = d_cat.row(bi, li);
            double* t1 = d_c1.row(bi, li);
            double* t3 = d_c3.row(bi, li);
            double* t5 = d_c5.row(bi, li);
            for (int i = 0; i < d; ++i) {
                t1[i] = src[i];
                t3[i] = src[d + i];
                t5[i] = src[2 * d + i];
            }
        }
    }
    conv1d_backward(ctx.f_i, d_c1, params_.conv1_w, params_.conv1_b, d_fi);
    conv1d_backward(ctx.f_i, d_c3, params_.conv3_w, params_.conv3_b, d_fi);
    conv1d_backward(ctx.f_i, d_c5, params_.conv5_w, params_.conv5_b, d_fi);
    return d_fi;
}

Tensor3 NmmModel::backward(const ForwardCtx& ctx, Tensor3 d_clean, Tensor3 d_noisy,
                           const Tensor3* d_merged) {
    if (d_merged != nullptr) {
        const Tensor3 cat2 = concat_d(ctx.f_clean, ctx.f_noisy);
        Tensor3 d_cat2 = linear_backward(cat2, *d_merged, params_.proj_w, &params_.proj_b);
        split_d(d_cat2, d_clean, d_noisy);
    }

    Tensor3 d_fi(ctx.f_i.b, ctx.f_i.l, ctx.f_i.d);
    switch (config_.ablation) {
        case Ablation::clean_only:
            accumulate(d_fi, clean_path_backward(ctx, d_clean));
            break;
        case Ablation::noisy_only:
            // f_clean = f_i - f_noisy
            accumulate(d_fi, d_clean);
            for (std::size_t i = 0; i < d_noisy.v.size(); ++i) d_noisy.v[i] -= d_clean.v[i];
            accumulate(d_fi, noisy_path_backward(ctx, d_noisy));
            break;
        default:
            accumulate(d_fi, clean_path_backward(ctx, d_clean));
            accumulate(d_fi, noisy_path_backward(ctx, d_noisy));
            break;
    }
    return d_fi;
}

void NmmModel::sgd_step(double lr) {
    for (Param* p : params_.active(config_)) {
        for (std::size_t i = 0; i < p->w.size(); ++i) p->w[i] -= lr * p->g[i];
    }
}

}  // namespace pcc::nmm
