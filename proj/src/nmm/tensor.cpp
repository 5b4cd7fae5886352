#include "pcc/nmm/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace pcc::nmm {

bool Tensor3::finite() const {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void Tensor3::require_shape(int b_, int l_, int d_, const char* who) const {
    if (b != b_ || l != l_ || d != d_)
        throw InvalidArgument(std::string(who) + ": tensor shape mismatch");
}

Tensor3 operator+(const Tensor3& a, const Tensor3& b) {
    if (!a.same_shape(b)) throw InvalidArgument("Tensor3 +: shape mismatch");
    Tensor3 out = a;
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.v[i];
    return out;
}

Tensor3 operator-(const Tensor3& a, const Tensor3& b) {
    if (!a.same_shape(b)) throw InvalidArgument("Tensor3 -: shape mismatch");
    Tensor3 out = a;
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] -= b.v[i];
    return out;
}

void accumulate(Tensor3& into, const Tensor3& delta) {
    if (!into.same_shape(delta)) throw InvalidArgument("Tensor3 accumulate: shape mismatch");
    for (std::size_t i = 0; i < into.v.size(); ++i) into.v[i] += delta.v[i];
}

namespace {
constexpr double kNormFloor = 1e-12;
}

Tensor3 normalize_rows(const Tensor3& x) {
    Tensor3 out = x;
    for (int bi = 0; bi < x.b; ++bi) {
        for (int li = 0; li < x.l; ++li) {
            const double* xi = x.row(bi, li);
            double* yi = out.row(bi, li);
            double n2 = 0.0;
            for (int di = 0; di < x.d; ++di) n2 += xi[di] * xi[di];
            const double inv = 1.0 / std::max(std::sqrt(n2), kNormFloor);
            for (int di = 0; di < x.d; ++di) yi[di] = xi[di] * inv;
        }
    }
    return out;
}

Tensor3 normalize_rows_backward(const Tensor3& x, const Tensor3& y, const Tensor3& gy) {
    Tensor3 gx(x.b, x.l, x.d);
    for (int bi = 0; bi < x.b; ++bi) {
        for (int li = 0; li < x.l; ++li) {
            const double* xi = x.row(bi, li);
            const double* yi = y.row(bi, li);
            const double* gi = gy.row(bi, li);
            double* oi = gx.row(bi, li);
            double n2 = 0.0;
            for (int di = 0; di < x.d; ++di) n2 += xi[di] * xi[di];
            const double inv = 1.0 / std::max(std::sqrt(n2), kNormFloor);
            double dot_gy_y = 0.0;
            for (int di = 0; di < x.d; ++di) dot_gy_y += gi[di] * yi[di];
            for (int di = 0; di < x.d; ++di) oi[di] = (gi[di] - dot_gy_y * yi[di]) * inv;
        }
    }
    return gx;
}

}  // namespace pcc::nmm
