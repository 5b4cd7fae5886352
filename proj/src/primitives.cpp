#include "pcc/primitives.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace pcc::geom {

namespace {

constexpr double kPi = std::numbers::pi;

Vec3 lerp_tri(const Vec3& a, const Vec3& b, const Vec3& c, double u, double v) {
    // Uniform on the triangle via the square-root warp.
    const double su = std::sqrt(u);
    const double wa = 1.0 - su;
    const double wb = su * (1.0 - v);
    const double wc = su * v;
    return a * wa + b * wb + c * wc;
}

/// Area-weighted face picker: faces is a list of cumulative areas.
std::size_t pick_face(const std::vector<double>& cumulative, RngStream& rng) {
    const double total = cumulative.back();
    const double r = rng.uniform(0.0, total);
    for (std::size_t i = 0; i < cumulative.size(); ++i) {
        if (r < cumulative[i]) return i;
    }
    return cumulative.size() - 1;
}

Vec3 sample_circle(RngStream& rng) {
    const double r = 0.5 * std::sqrt(rng.uniform());
    const double a = rng.uniform(0.0, 2.0 * kPi);
    return {r * std::cos(a), r * std::sin(a), 0.0};
}

Vec3 sample_square(RngStream& rng) {
    return {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 0.0};
}

Vec3 sample_rectangle(RngStream& rng) {
    return {rng.uniform(-0.5, 0.5), rng.uniform(-0.25, 0.25), 0.0};
}

Vec3 sample_triangle(RngStream& rng) {
    // Equilateral, side 1, centered on its bounding box.
    const double h = std::sqrt(3.0) / 2.0;
    const Vec3 a{-0.5, -h / 2.0, 0.0};
    const Vec3 b{0.5, -h / 2.0, 0.0};
    const Vec3 c{0.0, h / 2.0, 0.0};
    const double u = rng.uniform();
    const double v = rng.uniform();
    return lerp_tri(a, b, c, u, v);
}

Vec3 sample_ellipse(RngStream& rng) {
    const Vec3 p = sample_circle(rng);  // disk of radius 0.5
    return {p.x, p.y * 0.5, 0.0};       // semi-axes 0.5 and 0.25
}

Vec3 sample_hexagon(RngStream& rng) {
    // Regular hexagon, circumradius 0.5; fan of six congruent triangles.
    const std::size_t i = rng.uniform_index(6);
    const double a0 = static_cast<double>(i) * kPi / 3.0;
    const double a1 = a0 + kPi / 3.0;
    const Vec3 v0{0.5 * std::cos(a0), 0.5 * std::sin(a0), 0.0};
    const Vec3 v1{0.5 * std::cos(a1), 0.5 * std::sin(a1), 0.0};
    const double u = rng.uniform();
    const double v = rng.uniform();
    return lerp_tri({0, 0, 0}, v0, v1, u, v);
}

Vec3 sample_diamond(RngStream& rng) {
    // Rhombus with diagonals 1 (x) and 0.5 (y); two congruent triangles.
    const Vec3 right{0.5, 0, 0}, top{0, 0.25, 0}, left{-0.5, 0, 0}, bottom{0, -0.25, 0};
    const bool upper = rng.uniform_index(2) == 0;
    const double u = rng.uniform();
    const double v = rng.uniform();
    return lerp_tri(left, right, upper ? top : bottom, u, v);
}

Vec3 sample_parallelogram(RngStream& rng) {
    // Base 0.7, height 0.4, shear 0.3; unit x extent, centered.
    const Vec3 a{-0.5, -0.2, 0.0};
    const Vec3 ab{0.7, 0.0, 0.0};
    const Vec3 ad{0.3, 0.4, 0.0};
    const double u = rng.uniform();
    const double v = rng.uniform();
    return a + ab * u + ad * v;
}

Vec3 sample_cylinder(RngStream& rng) {
    // Axis along y, height 1, radius 0.25: lateral wall plus two caps.
    const double r = 0.25;
    const double lateral = 2.0 * kPi * r * 1.0;
    const double cap = kPi * r * r;
    const std::vector<double> cum{lateral, lateral + cap, lateral + 2.0 * cap};
    const std::size_t face = pick_face(cum, rng);
    if (face == 0) {
        const double a = rng.uniform(0.0, 2.0 * kPi);
        return {r * std::cos(a), rng.uniform(-0.5, 0.5), r * std::sin(a)};
    }
    const double rr = r * std::sqrt(rng.uniform());
    const double a = rng.uniform(0.0, 2.0 * kPi);
    const double y = face == 1 ? -0.5 : 0.5;
    return {rr * std::cos(a), y, rr * std::sin(a)};
}

Vec3 sample_sphere(RngStream& rng) {
    const double z = 1.0 - 2.0 * rng.uniform();
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec3{rxy * std::cos(phi), rxy * std::sin(phi), z} * 0.5;
}

Vec3 sample_cube(RngStream& rng) {
    const std::size_t face = rng.uniform_index(6);
    const int axis = static_cast<int>(face / 2);
    const double fixed = (face % 2 == 0) ? -0.5 : 0.5;
    const double u = rng.uniform(-0.5, 0.5);
    const double v = rng.uniform(-0.5, 0.5);
    Vec3 p;
    p[axis] = fixed;
    p[(axis + 1) % 3] = u;
    p[(axis + 2) % 3] = v;
    return p;
}

Vec3 sample_pyramid(RngStream& rng) {
    // Square base (side 1) at y = -0.5, apex at (0, 0.5, 0).
    const Vec3 apex{0.0, 0.5, 0.0};
    const std::array<Vec3, 4> base{Vec3{-0.5, -0.5, -0.5}, Vec3{0.5, -0.5, -0.5},
                                   Vec3{0.5, -0.5, 0.5}, Vec3{-0.5, -0.5, 0.5}};
    const double base_area = 1.0;
    // All four sides are congruent: base edge 1, apex over the base center.
    const Vec3 edge_mid = (base[0] + base[1]) * 0.5;
    const double slant = dist(apex, edge_mid);
    const double side_area = 0.5 * 1.0 * slant;
    std::vector<double> cum(5);
    cum[0] = base_area;
    for (int i = 1; i < 5; ++i) cum[i] = cum[i - 1] + side_area;

    const std::size_t face = pick_face(cum, rng);
    if (face == 0) return {rng.uniform(-0.5, 0.5), -0.5, rng.uniform(-0.5, 0.5)};
    const Vec3& a = base[face - 1];
    const Vec3& b = base[face % 4];
    const double u = rng.uniform();
    const double v = rng.uniform();
    return lerp_tri(a, b, apex, u, v);
}

}  // namespace

std::string_view primitive_name(PrimitiveKind kind) {
    switch (kind) {
        case PrimitiveKind::circle: return "circle";
        case PrimitiveKind::square: return "square";
        case PrimitiveKind::rectangle: return "rectangle";
        case PrimitiveKind::triangle: return "triangle";
        case PrimitiveKind::ellipse: return "ellipse";
        case PrimitiveKind::hexagon: return "hexagon";
        case PrimitiveKind::diamond: return "diamond";
        case PrimitiveKind::parallelogram: return "parallelogram";
        case PrimitiveKind::cylinder: return "cylinder";
        case PrimitiveKind::sphere: return "sphere";
        case PrimitiveKind::cube: return "cube";
        case PrimitiveKind::pyramid: return "pyramid";
    }
    return "unknown";
}

std::optional<PrimitiveKind> primitive_from_name(std::string_view name) {
    for (int i = 0; i < kPrimitiveCount; ++i) {
        const PrimitiveKind k = primitive_from_index(i);
        if (primitive_name(k) == name) return k;
    }
    return std::nullopt;
}

PrimitiveKind primitive_from_index(int idx) {
    if (idx < 0 || idx >= kPrimitiveCount)
        throw InvalidArgument("primitive_from_index: index out of range");
    return static_cast<PrimitiveKind>(idx);
}

PointCloud sample_primitive(PrimitiveKind kind, std::size_t n, RngStream& rng) {
    if (n < 1) throw InvalidArgument("sample_primitive: n must be >= 1");
    PointCloud out;
    out.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        switch (kind) {
            case PrimitiveKind::circle: out.points.push_back(sample_circle(rng)); break;
            case PrimitiveKind::square: out.points.push_back(sample_square(rng)); break;
            case PrimitiveKind::rectangle: out.points.push_back(sample_rectangle(rng)); break;
            case PrimitiveKind::triangle: out.points.push_back(sample_triangle(rng)); break;
            case PrimitiveKind::ellipse: out.points.push_back(sample_ellipse(rng)); break;
            case PrimitiveKind::hexagon: out.points.push_back(sample_hexagon(rng)); break;
            case PrimitiveKind::diamond: out.points.push_back(sample_diamond(rng)); break;
            case PrimitiveKind::parallelogram:
                out.points.push_back(sample_parallelogram(rng));
                break;
            case PrimitiveKind::cylinder: out.points.push_back(sample_cylinder(rng)); break;
            case PrimitiveKind::sphere: out.points.push_back(sample_sphere(rng)); break;
            case PrimitiveKind::cube: out.points.push_back(sample_cube(rng)); break;
            case PrimitiveKind::pyramid: out.points.push_back(sample_pyramid(rng)); break;
        }
    }
    return out;
}

}  // namespace pcc::geom
