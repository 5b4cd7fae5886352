#pragma once

#include "pcc/nn_index.hpp"
#include "pcc/point_cloud.hpp"
#include "pcc/rng.hpp"

namespace pcc::geom {

/// Plane in Hesse-like form: {p : dot(normal, p) = offset}. The normal need
/// not be unit length; a zero normal is rejected.
struct Plane {
    Vec3 normal;
    double offset = 0.0;
};

/// Tight componentwise bounding box. Throws EmptyCloudError on empty input.
Aabb aabb(const PointCloud& cloud);

/// Centroid (mean) of the points. Throws EmptyCloudError on empty input.
Vec3 centroid(const PointCloud& cloud);

/// Rotate about the cloud centroid by R_z(theta_z) * R_y(theta_y) * R_x(theta_x),
/// angles in degrees. Labels preserved.
PointCloud rotate(const PointCloud& cloud, double theta_x_deg, double theta_y_deg,
                  double theta_z_deg);

/// Uniform scale about the cloud centroid. s must be > 0; labels preserved.
PointCloud scale(const PointCloud& cloud, double s);

/// Orthogonal projection of every point onto the plane; labels preserved.
PointCloud project_to_plane(const PointCloud& cloud, const Plane& plane);

/// Greedy farthest point sampling. The first point is drawn from rng; each
/// subsequent point maximizes the min distance to the chosen set, ties going
/// to the lowest index. Output order is selection order. Requires 1 <= k <= count.
PointCloud farthest_point_sample(const PointCloud& cloud, std::size_t k, RngStream& rng);

}  // namespace pcc::geom
