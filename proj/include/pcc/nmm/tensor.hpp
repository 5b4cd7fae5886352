#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pcc/errors.hpp"

namespace pcc::nmm {

/// Dense rank-3 real tensor of shape B x L x D, row-major.
struct Tensor3 {
    int b = 0, l = 0, d = 0;
    std::vector<double> v;

    Tensor3() = default;
    Tensor3(int b_, int l_, int d_)
        : b(b_), l(l_), d(d_), v(static_cast<std::size_t>(b_) * l_ * d_, 0.0) {}

    double& at(int bi, int li, int di) {
        return v[(static_cast<std::size_t>(bi) * l + li) * d + di];
    }
    double at(int bi, int li, int di) const {
        return v[(static_cast<std::size_t>(bi) * l + li) * d + di];
    }
    /// Start of the length-D vector at position (bi, li).
    double* row(int bi, int li) { return v.data() + (static_cast<std::size_t>(bi) * l + li) * d; }
    const double* row(int bi, int li) const {
        return v.data() + (static_cast<std::size_t>(bi) * l + li) * d;
    }

    int positions() const { return b * l; }
    std::size_t size() const { return v.size(); }
    bool same_shape(const Tensor3& o) const { return b == o.b && l == o.l && d == o.d; }
    bool finite() const;

    void require_shape(int b_, int l_, int d_, const char* who) const;
};

Tensor3 operator+(const Tensor3& a, const Tensor3& b);
Tensor3 operator-(const Tensor3& a, const Tensor3& b);
void accumulate(Tensor3& into, const Tensor3& delta);

/// Parameter tensor with its gradient buffer. Conv kernels use taps > 1 and
/// index as [row=out][col=in][tap]; plain matrices/vectors use taps == 1.
struct Param {
    std::string name;
    int rows = 0, cols = 0, taps = 1;
    std::vector<double> w, g;

    Param() = default;
    Param(std::string name_, int rows_, int cols_, int taps_ = 1)
        : name(std::move(name_)),
          rows(rows_),
          cols(cols_),
          taps(taps_),
          w(static_cast<std::size_t>(rows_) * cols_ * taps_, 0.0),
          g(w.size(), 0.0) {}

    double& at(int r, int c, int t = 0) {
        return w[(static_cast<std::size_t>(r) * cols + c) * taps + t];
    }
    double at(int r, int c, int t = 0) const {
        return w[(static_cast<std::size_t>(r) * cols + c) * taps + t];
    }
    double& grad_at(int r, int c, int t = 0) {
        return g[(static_cast<std::size_t>(r) * cols + c) * taps + t];
    }

    std::size_t size() const { return w.size(); }
    void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }
};

/// Per-position L2 normalization along D with a 1e-12 floor on the norm;
/// unit inputs pass through unchanged.
Tensor3 normalize_rows(const Tensor3& x);
/// Backward of normalize_rows: gx = (gy - (gy . y) y) / max(|x|, floor).
Tensor3 normalize_rows_backward(const Tensor3& x, const Tensor3& y, const Tensor3& gy);

}  // namespace pcc::nmm
