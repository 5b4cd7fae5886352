#include "pcc/geom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace pcc::geom {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 matmul(const Mat3& a, const Mat3& b) {
    Mat3 m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) m[i][j] += a[i][k] * b[k][j];
    return m;
}

Vec3 mat_apply(const Mat3& m, const Vec3& p) {
    return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z};
}

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

Aabb aabb(const PointCloud& cloud) {
    if (cloud.empty()) throw EmptyCloudError("aabb: empty cloud");
    Aabb box{cloud.points.front(), cloud.points.front()};
    for (const Vec3& p : cloud.points) {
        for (int a = 0; a < 3; ++a) {
            box.min[a] = std::min(box.min[a], p[a]);
            box.max[a] = std::max(box.max[a], p[a]);
        }
    }
    return box;
}

Vec3 centroid(const PointCloud& cloud) {
    if (cloud.empty()) throw EmptyCloudError("centroid: empty cloud");
    Vec3 c;
    for (const Vec3& p : cloud.points) c += p;
    return c * (1.0 / static_cast<double>(cloud.size()));
}

PointCloud rotate(const PointCloud& cloud, double theta_x_deg, double theta_y_deg,
                  double theta_z_deg) {
    if (cloud.empty()) return cloud;
    if (theta_x_deg == 0.0 && theta_y_deg == 0.0 && theta_z_deg == 0.0) return cloud;
    const double ax = deg2rad(theta_x_deg);
    const double ay = deg2rad(theta_y_deg);
    const double az = deg2rad(theta_z_deg);
    const Mat3 rx{{{1, 0, 0}, {0, std::cos(ax), -std::sin(ax)}, {0, std::sin(ax), std::cos(ax)}}};
    const Mat3 ry{{{std::cos(ay), 0, std::sin(ay)}, {0, 1, 0}, {-std::sin(ay), 0, std::cos(ay)}}};
    const Mat3 rz{{{std::cos(az), -std::sin(az), 0}, {std::sin(az), std::cos(az), 0}, {0, 0, 1}}};
    const Mat3 r = matmul(rz, matmul(ry, rx));

    const Vec3 c = centroid(cloud);
    PointCloud out = cloud;
    for (Vec3& p : out.points) p = c + mat_apply(r, p - c);
    return out;
}

PointCloud scale(const PointCloud& cloud, double s) {
    if (!(s > 0.0)) throw InvalidArgument("scale: factor must be > 0");
    if (cloud.empty() || s == 1.0) return cloud;
    const Vec3 c = centroid(cloud);
    PointCloud out = cloud;
    for (Vec3& p : out.points) p = c + (p - c) * s;
    return out;
}

PointCloud project_to_plane(const PointCloud& cloud, const Plane& plane) {
    const double n2 = norm2(plane.normal);
    if (n2 == 0.0) throw InvalidArgument("project_to_plane: zero normal");
    PointCloud out = cloud;
    for (Vec3& p : out.points) {
        const double t = (dot(plane.normal, p) - plane.offset) / n2;
        p = p - plane.normal * t;
    }
    return out;
}

PointCloud farthest_point_sample(const PointCloud& cloud, std::size_t k, RngStream& rng) {
    const std::size_t n = cloud.size();
    if (k < 1 || k > n)
        throw InvalidArgument("farthest_point_sample: k must be in [1, count]");

    std::vector<std::size_t> selected;
    selected.reserve(k);
    std::size_t current = rng.uniform_index(n);
    selected.push_back(current);

    std::vector<char> taken(n, 0);
    taken[current] = 1;
    std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
    for (std::size_t step = 1; step < k; ++step) {
        std::size_t best = n;
        double best_d2 = -1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (taken[j]) continue;
            const double d2 = dist2(cloud.points[j], cloud.points[current]);
            if (d2 < min_d2[j]) min_d2[j] = d2;
            // Strict > keeps the lowest index on ties.
            if (min_d2[j] > best_d2) {
                best_d2 = min_d2[j];
                best = j;
            }
        }
        current = best;
        taken[best] = 1;
        selected.push_back(current);
    }

    PointCloud out;
    out.points.reserve(k);
    if (cloud.has_labels()) out.labels.reserve(k);
    for (std::size_t idx : selected) {
        if (cloud.has_labels())
            out.push_back(cloud.points[idx], cloud.labels[idx]);
        else
            out.push_back(cloud.points[idx]);
    }
    return out;
}

}  // namespace pcc::geom
