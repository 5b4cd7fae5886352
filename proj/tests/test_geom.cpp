#include "doctest.h"

#include <algorithm>
#include <set>

#include "pcc/geom.hpp"

using namespace pcc;
using namespace pcc::geom;

namespace {

PointCloud random_cloud(std::size_t n, RngStream& rng) {
    PointCloud cloud;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform(0.0, 1.0);
        const double y = rng.uniform(0.0, 1.0);
        const double z = rng.uniform(0.0, 1.0);
        cloud.points.push_back({x, y, z});
    }
    return cloud;
}

/// Greedy FPS oracle that recomputes every min-distance from scratch.
std::vector<std::size_t> fps_oracle(const PointCloud& cloud, std::size_t k, std::size_t first) {
    std::vector<std::size_t> chosen{first};
    while (chosen.size() < k) {
        std::size_t best = cloud.size();
        double best_d2 = -1.0;
        for (std::size_t j = 0; j < cloud.size(); ++j) {
            if (std::find(chosen.begin(), chosen.end(), j) != chosen.end()) continue;
            double mind2 = std::numeric_limits<double>::infinity();
            for (std::size_t c : chosen) mind2 = std::min(mind2, dist2(cloud.points[j], cloud.points[c]));
            if (mind2 > best_d2) {
                best_d2 = mind2;
                best = j;
            }
        }
        chosen.push_back(best);
    }
    return chosen;
}

}  // namespace

TEST_CASE("aabb basics") {
    CHECK_THROWS_AS(aabb(PointCloud{}), EmptyCloudError);

    const PointCloud single{{{0, 0, 0}}};
    const Aabb b1 = aabb(single);
    CHECK(b1.min == Vec3{0, 0, 0});
    CHECK(b1.max == Vec3{0, 0, 0});

    PointCloud two;
    two.points = {{-1, 0, 2}, {3, -2, 0}};
    const Aabb b2 = aabb(two);
    CHECK(b2.min == Vec3{-1, -2, 0});
    CHECK(b2.max == Vec3{3, 0, 2});
}

TEST_CASE("aabb equals brute-force min/max on 1000 uniform points") {
    RngStream rng(0, "geom", "aabb");
    const PointCloud cloud = random_cloud(1000, rng);
    const Aabb box = aabb(cloud);
    Vec3 lo = cloud.points[0], hi = cloud.points[0];
    for (const Vec3& p : cloud.points) {
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    CHECK(box.min == lo);
    CHECK(box.max == hi);
    CHECK(box.min.x >= 0.0);
    CHECK(box.max.x <= 1.0);
}

TEST_CASE("rotate identity and analytic 90 degrees") {
    PointCloud cloud;
    cloud.points = {{1, 0, 0}, {-1, 0, 0}};  // centroid at origin
    const PointCloud same = rotate(cloud, 0, 0, 0);
    CHECK(same.points[0] == cloud.points[0]);

    const PointCloud r = rotate(cloud, 0, 0, 90);
    CHECK(r.points[0].x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.points[0].y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.points[0].z == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rotate preserves pairwise distances within 1e-9") {
    RngStream rng(1, "geom", "rigid");
    const PointCloud cloud = random_cloud(100, rng);
    const PointCloud rotated = rotate(cloud, rng.uniform(0, 360), rng.uniform(0, 360),
                                      rng.uniform(0, 360));
    for (int k = 0; k < 500; ++k) {
        const std::size_t i = rng.uniform_index(cloud.size());
        const std::size_t j = rng.uniform_index(cloud.size());
        const double before = dist(cloud.points[i], cloud.points[j]);
        const double after = dist(rotated.points[i], rotated.points[j]);
        CHECK(std::abs(before - after) <= 1e-9);
    }
}

TEST_CASE("rotate preserves labels") {
    PointCloud cloud;
    cloud.push_back({0, 0, 0}, PointLabel::object);
    cloud.push_back({1, 1, 1}, PointLabel::added);
    const PointCloud rotated = rotate(cloud, 5, 5, 5);
    REQUIRE(rotated.labels.size() == 2);
    CHECK(rotated.labels[1] == PointLabel::added);
}

TEST_CASE("scale identity, doubling, and quarter AABB") {
    RngStream rng(2, "geom", "scale");
    const PointCloud cloud = random_cloud(50, rng);

    const PointCloud same = scale(cloud, 1.0);
    CHECK(same.points[7] == cloud.points[7]);

    const PointCloud doubled = scale(cloud, 2.0);
    for (int k = 0; k < 200; ++k) {
        const std::size_t i = rng.uniform_index(cloud.size());
        const std::size_t j = rng.uniform_index(cloud.size());
        CHECK(dist(doubled.points[i], doubled.points[j]) ==
              doctest::Approx(2.0 * dist(cloud.points[i], cloud.points[j])).epsilon(1e-9));
    }

    const PointCloud quarter = scale(cloud, 0.25);
    const Vec3 before = aabb(cloud).extent();
    const Vec3 after = aabb(quarter).extent();
    for (int a = 0; a < 3; ++a) CHECK(after[a] == doctest::Approx(before[a] / 4.0).epsilon(1e-12));

    CHECK_THROWS_AS(scale(cloud, 0.0), InvalidArgument);
    CHECK_THROWS_AS(scale(cloud, -1.0), InvalidArgument);
}

TEST_CASE("project_to_plane") {
    const Plane z0{{0, 0, 1}, 0.0};
    PointCloud cloud;
    cloud.points = {{0.25, -0.5, 0.0}, {0, 0, 5}};
    const PointCloud projected = project_to_plane(cloud, z0);
    CHECK(projected.points[0] == cloud.points[0]);  // already on the plane
    CHECK(projected.points[1] == Vec3{0, 0, 0});

    RngStream rng(3, "geom", "proj");
    const PointCloud random = random_cloud(200, rng);
    const Plane tilted{{1.0, -2.0, 0.5}, 0.3};
    const PointCloud onto = project_to_plane(random, tilted);
    for (const Vec3& p : onto.points) {
        CHECK(std::abs(dot(tilted.normal, p) - tilted.offset) <= 1e-12);
    }
    CHECK_THROWS_AS(project_to_plane(random, Plane{{0, 0, 0}, 1.0}), InvalidArgument);
}

TEST_CASE("farthest_point_sample basics") {
    RngStream rng(4, "geom", "fps");
    const PointCloud cloud = random_cloud(64, rng);

    CHECK_THROWS_AS(farthest_point_sample(cloud, 0, rng), InvalidArgument);
    CHECK_THROWS_AS(farthest_point_sample(cloud, cloud.size() + 1, rng), InvalidArgument);

    RngStream rng_k1(4, "geom", "fps-k1");
    const PointCloud one = farthest_point_sample(cloud, 1, rng_k1);
    RngStream rng_k1b(4, "geom", "fps-k1");
    const std::size_t seed_idx = rng_k1b.uniform_index(cloud.size());
    REQUIRE(one.size() == 1);
    CHECK(one.points[0] == cloud.points[seed_idx]);
}

TEST_CASE("fps with k = count is a permutation of the input") {
    RngStream rng(5, "geom", "fps-perm");
    const PointCloud cloud = random_cloud(40, rng);
    RngStream sel(5, "geom", "fps-perm-sel");
    const PointCloud all = farthest_point_sample(cloud, cloud.size(), sel);
    REQUIRE(all.size() == cloud.size());
    std::multiset<std::string> want, got;
    const auto key = [](const Vec3& p) {
        return std::to_string(p.x) + "," + std::to_string(p.y) + "," + std::to_string(p.z);
    };
    for (const Vec3& p : cloud.points) want.insert(key(p));
    for (const Vec3& p : all.points) got.insert(key(p));
    CHECK(want == got);
}

TEST_CASE("fps matches the brute-force greedy oracle") {
    RngStream rng(6, "geom", "fps-oracle");
    const PointCloud cloud = random_cloud(64, rng);
    for (const std::size_t k : {3u, 8u, 20u}) {
        RngStream a(6, "geom", "fps-run");
        const PointCloud sampled = farthest_point_sample(cloud, k, a);
        RngStream b(6, "geom", "fps-run");
        const std::size_t first = b.uniform_index(cloud.size());
        const auto oracle = fps_oracle(cloud, k, first);
        REQUIRE(sampled.size() == k);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(sampled.points[i] == cloud.points[oracle[i]]);
        }
    }
}

TEST_CASE("fps is deterministic under identical keys and duplicate-free") {
    RngStream rng(7, "geom", "fps-det");
    const PointCloud cloud = random_cloud(128, rng);
    RngStream a(7, "geom", "same-key");
    RngStream b(7, "geom", "same-key");
    const PointCloud s1 = farthest_point_sample(cloud, 32, a);
    const PointCloud s2 = farthest_point_sample(cloud, 32, b);
    REQUIRE(s1.size() == s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1.points[i] == s2.points[i]);

    std::set<std::pair<double, double>> unique;
    for (const Vec3& p : s1.points) unique.insert({p.x, p.y});
    CHECK(unique.size() == s1.size());
}
