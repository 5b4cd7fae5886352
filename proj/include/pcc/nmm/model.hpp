#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "pcc/nmm/tensor.hpp"
#include "pcc/rng.hpp"

namespace pcc::nmm {

enum class Ablation { none, clean_only, noisy_only, no_attention, single_scale };

std::string_view ablation_name(Ablation a);
std::optional<Ablation> ablation_from_name(std::string_view name);

struct NmmConfig {
    int b = 2;
    int l = 8;
    int d = 64;
    int heads = 8;
    double t = 1.0;  // negative-loss temperature
    Ablation ablation = Ablation::none;
    double ln_eps = 1e-5;

    void validate() const;
};

/// All learnable tensors of the module. Which ones participate depends on the
/// ablation; `active()` lists the participating set for a config.
struct NmmParams {
    // Clean path: 8-head self-attention + position-wise FFN, two pre-LNs.
    Param wq, bq, wk, bk, wv, bv, wo, bo;
    Param ln1_gain, ln1_bias, ln2_gain, ln2_bias;
    Param ffn_w1, ffn_b1, ffn_w2, ffn_b2;
    // no_attention variant replaces the MHSA sublayer with Linear+ReLU.
    Param mlp_w, mlp_b;
    // Noisy path: parallel 1D convolutions (k = 1,3,5) and merge weights.
    Param conv1_w, conv1_b, conv3_w, conv3_b, conv5_w, conv5_b;
    Param merge_w;  // D x (3D), or D x D under single_scale
    // Path merge: learned projection of [f_clean | f_noisy] back to D.
    Param proj_w, proj_b;

    std::vector<Param*> all();
    std::vector<Param*> active(const NmmConfig& config);
    void zero_grad();
};

/// Cached activations from one forward pass, consumed by backward().
struct ForwardCtx {
    Tensor3 f_i;
    // Clean path caches
    Tensor3 q, k, v;                  // projections (attention variant)
    std::vector<double> attn;         // B x H x L x L softmax weights
    Tensor3 attn_ctx;                 // concatenated head outputs, pre-Wo
    Tensor3 mhsa_out;                 // sublayer output (or MLP output)
    Tensor3 mlp_pre;                  // pre-ReLU (no_attention variant)
    Tensor3 res1;                     // f_i + sublayer
    Tensor3 h1;                       // LN1(res1)
    std::vector<double> ln1_mu, ln1_inv;
    Tensor3 ffn_pre;                  // lin1(h1) pre-ReLU
    Tensor3 ffn_mid;                  // relu(ffn_pre)
    Tensor3 res2;                     // h1 + lin2(ffn_mid)
    std::vector<double> ln2_mu, ln2_inv;
    // Path outputs
    Tensor3 f_clean;                  // raw clean features
    Tensor3 conv_cat;                 // concatenated conv outputs (B,L,3D or D)
    Tensor3 f_noisy;                  // raw noisy features
    Tensor3 f_merged;                 // projection of [f_clean | f_noisy]
};

/// Desk-scale Noise Management Module: dual-path forward (clean transformer
/// branch + multi-scale convolution branch), learned merge, and hand-written
/// backward for the whole graph.
class NmmModel {
public:
    NmmModel(const NmmConfig& config, std::uint64_t init_seed);

    const NmmConfig& config() const { return config_; }
    NmmParams& params() { return params_; }
    const NmmParams& params() const { return params_; }

    /// Runs the enabled paths. When `with_merge` is false the merged output is
    /// skipped (the NMM losses do not depend on it).
    ForwardCtx forward(const Tensor3& f_i, bool with_merge = true) const;

    /// Accumulates parameter gradients (and returns d f_i) given upstream
    /// gradients on the raw path outputs and optionally on f_merged.
    Tensor3 backward(const ForwardCtx& ctx, Tensor3 d_clean, Tensor3 d_noisy,
                     const Tensor3* d_merged = nullptr);

    /// Plain gradient-descent update on every active tensor.
    void sgd_step(double lr);

private:
    Tensor3 clean_path(const Tensor3& f_i, ForwardCtx& ctx) const;
    Tensor3 noisy_path(const Tensor3& f_i, ForwardCtx& ctx) const;
    Tensor3 clean_path_backward(const ForwardCtx& ctx, const Tensor3& d_out);
    Tensor3 noisy_path_backward(const ForwardCtx& ctx, const Tensor3& d_out);

    NmmConfig config_;
    NmmParams params_;
};

/// Standalone layer ops shared by the model and the tests.
Tensor3 layer_norm(const Tensor3& x, const Param& gain, const Param& bias, double eps,
                   std::vector<double>* mu_cache = nullptr,
                   std::vector<double>* inv_cache = nullptr);
Tensor3 layer_norm_backward(const Tensor3& x, const Tensor3& gy, const Param& gain,
                            const std::vector<double>& mu, const std::vector<double>& inv,
                            Param* gain_grad, Param* bias_grad);

/// Multi-head self-attention over the L axis with output projection.
/// attn_out, when given, receives the B x H x L x L attention weights.
Tensor3 mhsa(const Tensor3& x, const NmmParams& params, int heads,
             std::vector<double>* attn_out = nullptr, Tensor3* q_out = nullptr,
             Tensor3* k_out = nullptr, Tensor3* v_out = nullptr, Tensor3* ctx_out = nullptr);

}  // namespace pcc::nmm
