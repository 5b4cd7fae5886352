#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "pcc/point_cloud.hpp"

namespace pcc {

/// Immutable kd-tree over a point cloud supporting exact nearest-neighbor
/// queries. Results are guaranteed to match an exhaustive linear scan
/// bit-for-bit: squared distances are evaluated with the same expression, and
/// ties resolve to the lowest point index.
class NnIndex {
public:
    struct Hit {
        std::size_t index = 0;
        double dist = 0.0;   // Euclidean distance
        double dist2 = 0.0;  // squared Euclidean distance
    };

    /// Throws EmptyCloudError on an empty cloud.
    explicit NnIndex(const PointCloud& cloud);
    explicit NnIndex(std::vector<Vec3> points);

    std::size_t size() const { return pts_.size(); }
    const Vec3& point(std::size_t i) const { return pts_[i]; }

    Hit nearest(const Vec3& q) const;
    /// Nearest neighbor skipping one index (for self-queries on indexed points).
    Hit nearest_excluding(const Vec3& q, std::size_t exclude) const;

private:
    static constexpr std::uint32_t kLeafSize = 8;
    static constexpr std::uint32_t kNoChild = std::numeric_limits<std::uint32_t>::max();

    struct Node {
        // Leaf when axis == 3: [begin, end) into order_.
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::uint32_t left = kNoChild;
        std::uint32_t right = kNoChild;
        std::uint8_t axis = 3;
        double split = 0.0;
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::uint32_t node, const Vec3& q, std::size_t exclude, Hit& best) const;

    std::vector<Vec3> pts_;            // original order
    std::vector<std::uint32_t> order_; // permutation referenced by leaves
    std::vector<Node> nodes_;
    std::uint32_t root_ = kNoChild;
};

/// Mean distance from each point to its nearest other point. Used by the
/// corruption layer to match background density to the object's density.
/// Returns 0 for clouds with fewer than two points.
double mean_nn_distance(const PointCloud& cloud);

}  // namespace pcc
