#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pcc/errors.hpp"

namespace pcc {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double& operator[](int axis) { return axis == 0 ? x : (axis == 1 ? y : z); }
    double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline double dist2(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}
inline double dist(const Vec3& a, const Vec3& b) { return std::sqrt(dist2(a, b)); }
inline double l1_norm(const Vec3& a) { return std::abs(a.x) + std::abs(a.y) + std::abs(a.z); }
inline bool finite(const Vec3& a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Per-point provenance: `object` points belong to the source object, `added`
/// points were introduced by an external corruption (wall, floor, clutter shape).
enum class PointLabel : std::uint8_t { object = 0, added = 1 };

/// Ordered set of 3D points in normalized object units, with optional
/// per-point provenance labels. Labels, when present, match the point count.
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<PointLabel> labels;  // empty, or one entry per point

    PointCloud() = default;
    explicit PointCloud(std::vector<Vec3> pts) : points(std::move(pts)) {}

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_labels() const { return !labels.empty(); }

    PointLabel label(std::size_t i) const {
        return labels.empty() ? PointLabel::object : labels[i];
    }

    void push_back(const Vec3& p) {
        points.push_back(p);
        if (!labels.empty()) labels.push_back(PointLabel::object);
    }
    /// Append a labeled point, materializing the label array on first use.
    void push_back(const Vec3& p, PointLabel lab) {
        if (labels.empty()) labels.assign(points.size(), PointLabel::object);
        points.push_back(p);
        labels.push_back(lab);
    }

    /// Subset of points carrying the given label (order preserved).
    PointCloud with_label(PointLabel lab) const {
        PointCloud out;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (label(i) == lab) out.points.push_back(points[i]);
        }
        return out;
    }

    /// Throws unless every coordinate is finite and labels (if any) line up.
    void validate(const char* where = "PointCloud") const {
        if (!labels.empty() && labels.size() != points.size())
            throw InvalidArgument(std::string(where) + ": label count != point count");
        for (const Vec3& p : points) {
            if (!finite(p)) throw InvalidArgument(std::string(where) + ": non-finite coordinate");
        }
    }
};

/// Axis-aligned bounding box; min <= max componentwise.
struct Aabb {
    Vec3 min;
    Vec3 max;

    Vec3 extent() const { return max - min; }
    Vec3 center() const { return (min + max) * 0.5; }
    double max_extent() const {
        const Vec3 e = extent();
        return std::max(e.x, std::max(e.y, e.z));
    }
    bool contains(const Vec3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
               p.z <= max.z;
    }
    Aabb dilated(double r) const {
        return {{min.x - r, min.y - r, min.z - r}, {max.x + r, max.y + r, max.z + r}};
    }
};

}  // namespace pcc
