#include "pcc/nn_index.hpp"

#include <algorithm>
#include <cmath>

namespace pcc {

NnIndex::NnIndex(const PointCloud& cloud) : NnIndex(cloud.points) {}

NnIndex::NnIndex(std::vector<Vec3> points) : pts_(std::move(points)) {
    if (pts_.empty()) throw EmptyCloudError("NnIndex: empty cloud");
    order_.resize(pts_.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    nodes_.reserve(2 * pts_.size() / kLeafSize + 2);
    root_ = build(0, static_cast<std::uint32_t>(order_.size()));
}

std::uint32_t NnIndex::build(std::uint32_t begin, std::uint32_t end) {
    const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});

    if (end - begin <= kLeafSize) {
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }

    // Split on the axis of largest extent over this range.
    Vec3 lo = pts_[order_[begin]];
    Vec3 hi = lo;
    for (std::uint32_t i = begin + 1; i < end; ++i) {
        const Vec3& p = pts_[order_[i]];
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    int axis = 0;
    double best_ext = hi.x - lo.x;
    for (int a = 1; a < 3; ++a) {
        if (hi[a] - lo[a] > best_ext) {
            best_ext = hi[a] - lo[a];
            axis = a;
        }
    }
    if (best_ext == 0.0) {  // all points identical over this range
        nodes_[id].begin = begin;
        nodes_[id].end = end;
        return id;
    }

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) { return pts_[a][axis] < pts_[b][axis]; });

    nodes_[id].axis = static_cast<std::uint8_t>(axis);
    nodes_[id].split = pts_[order_[mid]][axis];
    const std::uint32_t l = build(begin, mid);
    const std::uint32_t r = build(mid, end);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
}

void NnIndex::search(std::uint32_t node_id, const Vec3& q, std::size_t exclude, Hit& best) const {
    const Node& node = nodes_[node_id];
    if (node.axis == 3) {
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const std::uint32_t idx = order_[i];
            if (idx == exclude) continue;
            const double d2 = dist2(q, pts_[idx]);
            if (d2 < best.dist2 || (d2 == best.dist2 && idx < best.index)) {
                best.dist2 = d2;
                best.index = idx;
            }
        }
        return;
    }

    const double delta = q[node.axis] - node.split;
    const std::uint32_t near = delta < 0.0 ? node.left : node.right;
    const std::uint32_t far = delta < 0.0 ? node.right : node.left;
    search(near, q, exclude, best);
    // <= keeps equidistant candidates reachable so the lowest-index tie wins.
    if (delta * delta <= best.dist2) search(far, q, exclude, best);
}

NnIndex::Hit NnIndex::nearest(const Vec3& q) const {
    return nearest_excluding(q, static_cast<std::size_t>(-1));
}

NnIndex::Hit NnIndex::nearest_excluding(const Vec3& q, std::size_t exclude) const {
    if (pts_.size() == 1 && exclude == 0)
        throw InvalidArgument("nearest_excluding: no other point in index");
    Hit best;
    best.index = pts_.size();
    best.dist2 = std::numeric_limits<double>::infinity();
    search(root_, q, exclude, best);
    best.dist = std::sqrt(best.dist2);
    return best;
}

double mean_nn_distance(const PointCloud& cloud) {
    if (cloud.size() < 2) return 0.0;
    const NnIndex index(cloud);
    double sum = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        sum += index.nearest_excluding(cloud.points[i], i).dist;
    }
    return sum / static_cast<double>(cloud.size());
}

}  // namespace pcc
