#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "pcc/corruption.hpp"
#include "pcc/geom.hpp"
#include "pcc/nn_index.hpp"

using namespace pcc;
using namespace pcc::corrupt;

namespace {

/// Shell-like stand-in for a partial scan: the top hemisphere of a sphere,
/// radius 0.5, shifted so it spans y in [0, 0.5].
PointCloud hemisphere(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed, "testcloud", "hemisphere");
    PointCloud cloud;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng.uniform();  // upper half only
        const double phi = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
        cloud.points.push_back({0.5 * rxy * std::cos(phi), 0.5 * z, 0.5 * rxy * std::sin(phi)});
    }
    return cloud;
}

/// Chair-like cloud: seat slab, backrest, and four legs reaching y = -0.5.
PointCloud chair(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed, "testcloud", "chair");
    PointCloud cloud;
    while (cloud.size() < n) {
        const double pick = rng.uniform();
        const double u = rng.uniform();
        const double v = rng.uniform();
        if (pick < 0.4) {  // seat at y = 0
            cloud.points.push_back({u - 0.5, 0.0, v * 0.8 - 0.4});
        } else if (pick < 0.7) {  // backrest at z = -0.4
            cloud.points.push_back({u - 0.5, v * 0.5, -0.4});
        } else {  // legs
            const bool px = rng.uniform_index(2) == 0;
            const bool pz = rng.uniform_index(2) == 0;
            cloud.points.push_back({px ? 0.45 : -0.45, -0.5 * u, pz ? 0.35 : -0.35});
        }
    }
    return cloud;
}

bool same_points(const PointCloud& a, const PointCloud& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a.points[i] == b.points[i])) return false;
    }
    return true;
}

double min_added_to_object_dist(const CorruptionResult& result, const PointCloud& object) {
    const NnIndex index(object);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < result.cloud.size(); ++i) {
        if (result.cloud.label(i) != PointLabel::added) continue;
        best = std::min(best, index.nearest(result.cloud.points[i]).dist);
    }
    return best;
}

}  // namespace

TEST_CASE("sampled parameters stay inside their domains") {
    const std::set<double> eoi_fracs{1.0 / 16, 1.0 / 12, 1.0 / 8, 1.0 / 4};
    const std::set<double> oboo_fracs{1.0 / 8, 1.0 / 7, 1.0 / 6, 1.0 / 5, 1.0 / 4, 1.0 / 3};
    std::set<std::size_t> rcc_sizes;
    for (int i = 0; i < 1000; ++i) {
        RngStream rng(100, "domain" + std::to_string(i), "params");

        const auto eoi = sample_params(Kind::eoi, rng);
        CHECK(eoi.n_objects >= 1);
        CHECK(eoi.n_objects <= 3);
        CHECK(eoi_fracs.count(eoi.point_fraction) == 1);
        CHECK(eoi.distance >= 0.05);
        CHECK(eoi.distance <= 0.2);

        const auto biw = sample_params(Kind::biw, rng);
        CHECK(biw.distance >= 0.01);
        CHECK(biw.distance <= 0.05);

        const auto oboo = sample_params(Kind::oboo, rng);
        CHECK(oboo.n_objects >= 1);
        CHECK(oboo.n_objects <= 4);
        CHECK(oboo_fracs.count(oboo.point_fraction) == 1);

        const auto djt = sample_params(Kind::djt, rng);
        CHECK(djt.jitter >= 0.01);
        CHECK(djt.jitter <= 0.05);
        CHECK(djt.trail >= 0.02);
        CHECK(djt.trail <= 0.04);

        const auto tr = sample_params(Kind::tr, rng);
        for (double a : {tr.theta_x, tr.theta_y, tr.theta_z}) {
            CHECK(a >= 0.0);
            CHECK(a <= 10.0);
        }

        const auto is = sample_params(Kind::is, rng);
        CHECK(is.scale >= 0.25);
        CHECK(is.scale <= 2.0);

        const auto rcc = sample_params(Kind::rcc, rng);
        CHECK(rcc.subset.size() >= 2);
        CHECK(rcc.subset.size() <= 7);
        rcc_sizes.insert(rcc.subset.size());
    }
    CHECK(rcc_sizes.size() == 6);  // every size 2..7 observed
}

TEST_CASE("spec validation rejects out-of-domain values") {
    CorruptionSpec spec;
    spec.kind = Kind::tr;
    spec.theta_x = 11.0;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec.theta_x = 5.0;
    CHECK_NOTHROW(spec.validate());

    spec.kind = Kind::is;
    spec.scale = 0.1;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);

    spec.kind = Kind::eoi;
    spec.n_objects = 2;
    spec.point_fraction = 0.3;  // not a member of the discrete set
    spec.distance = 0.1;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec.point_fraction = 0.25;
    CHECK_NOTHROW(spec.validate());

    spec.kind = Kind::rcc;
    spec.subset = {Kind::is};
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec.subset = {Kind::is, Kind::is};
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec.subset = {Kind::is, Kind::tr};
    CHECK_NOTHROW(spec.validate());
}

TEST_CASE("eoi adds the exact count and preserves the object subsequence") {
    const PointCloud cloud = hemisphere(2048, 1);
    const auto result = corrupt_cloud(cloud, Kind::eoi, 0, "eoi-case");
    REQUIRE(result.spec.kind == Kind::eoi);

    const std::size_t expect_added =
        round_count(result.spec.point_fraction * static_cast<double>(cloud.size()));
    CHECK(result.stats.added == expect_added);
    CHECK(result.cloud.size() == cloud.size() + expect_added);
    CHECK(same_points(result.cloud.with_label(PointLabel::object), cloud));

    // Pinned N_p = 1/4 on a 2048-point cloud: 512 added, 2560 total.
    Recipe recipe;
    recipe.pins["eoi.point_fraction"] = "1/4";
    const auto pinned = corrupt_cloud(cloud, Kind::eoi, 0, "eoi-case", recipe);
    CHECK(pinned.stats.added == 512);
    CHECK(pinned.cloud.size() == 2560);
}

TEST_CASE("eoi added points respect the distance envelope and dilated box") {
    const PointCloud cloud = hemisphere(1024, 2);
    const Aabb box = geom::aabb(cloud);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto result = corrupt_cloud(cloud, Kind::eoi, seed, "eoi-envelope");
        const double min_dist = min_added_to_object_dist(result, cloud);
        CHECK(min_dist >= 0.05 * 0.95);
        CHECK(min_dist <= 0.2 * 1.05);
        const Aabb dilated = box.dilated(result.spec.distance + 1e-9);
        for (std::size_t i = 0; i < result.cloud.size(); ++i) {
            if (result.cloud.label(i) == PointLabel::added)
                CHECK(dilated.contains(result.cloud.points[i]));
        }
    }
}

TEST_CASE("biw wall lies on an axis plane at gap N_d with no occluded points") {
    const PointCloud cloud = hemisphere(1024, 3);
    const Aabb box = geom::aabb(cloud);
    const auto result = corrupt_cloud(cloud, Kind::biw, 0, "biw-case");

    CHECK(same_points(result.cloud.with_label(PointLabel::object), cloud));
    CHECK(result.stats.added > 0);

    // Identify the wall plane: all added points share one coordinate.
    std::vector<Vec3> wall;
    for (std::size_t i = 0; i < result.cloud.size(); ++i) {
        if (result.cloud.label(i) == PointLabel::added) wall.push_back(result.cloud.points[i]);
    }
    int axis = -1;
    for (int a = 0; a < 3; ++a) {
        bool constant = true;
        for (const Vec3& p : wall) {
            if (p[a] != wall[0][a]) constant = false;
        }
        if (constant) axis = a;
    }
    REQUIRE(axis >= 0);
    const double w = wall[0][axis];
    const double gap = std::min(std::abs(w - box.min[axis]), std::abs(w - box.max[axis]));
    CHECK(gap == doctest::Approx(result.spec.distance).epsilon(1e-9));

    // No wall point within r_occ of the projected object footprint.
    PointCloud projected = cloud;
    for (Vec3& p : projected.points) p[axis] = w;
    const NnIndex proj(projected);
    const double r_occ = 2.0 * mean_nn_distance(cloud);
    for (const Vec3& p : wall) {
        CHECK(proj.nearest(p).dist >= r_occ);
    }
}

TEST_CASE("bif gate: clouds that sit above the bottom quarter are unchanged") {
    const PointCloud high = hemisphere(512, 4);  // spans y in [0, 0.5]
    const auto result = corrupt_cloud(high, Kind::bif, 0, "bif-high");
    CHECK(same_points(result.cloud, high));
    CHECK(result.stats.added == 0);
}

TEST_CASE("bif adds a floor at y_min under chair-like clouds") {
    const PointCloud seat = chair(1200, 5);
    const double y_min = geom::aabb(seat).min.y;
    const auto result = corrupt_cloud(seat, Kind::bif, 0, "bif-chair");
    CHECK(result.stats.added > 0);
    CHECK(same_points(result.cloud.with_label(PointLabel::object), seat));

    PointCloud projected = seat;
    for (Vec3& p : projected.points) p.y = y_min;
    const NnIndex proj(projected);
    const double r_occ = 2.0 * mean_nn_distance(seat);
    for (std::size_t i = 0; i < result.cloud.size(); ++i) {
        if (result.cloud.label(i) != PointLabel::added) continue;
        CHECK(std::abs(result.cloud.points[i].y - y_min) <= 1e-9);
        CHECK(proj.nearest(result.cloud.points[i]).dist >= r_occ);
    }
}

TEST_CASE("oboo removes exactly round(N_p*N_t) points, output subset of input") {
    const PointCloud cloud = hemisphere(2048, 6);
    Recipe recipe;
    recipe.pins["oboo.point_fraction"] = "1/8";
    const auto result = corrupt_cloud(cloud, Kind::oboo, 0, "oboo-case", recipe);
    CHECK(result.stats.removed == 256);
    CHECK(result.cloud.size() == 1792);

    // Survivors appear in input order.
    std::size_t cursor = 0;
    for (const Vec3& p : result.cloud.points) {
        while (cursor < cloud.size() && !(cloud.points[cursor] == p)) ++cursor;
        REQUIRE(cursor < cloud.size());
        ++cursor;
    }
}

TEST_CASE("oboo removals form coherent holes, tighter than random dropout") {
    const PointCloud cloud = hemisphere(1024, 7);
    const auto result = corrupt_cloud(cloud, Kind::oboo, 1, "oboo-coherent");

    // Recover the removed subset by set difference on exact coordinates.
    std::set<std::pair<double, std::pair<double, double>>> kept;
    for (const Vec3& p : result.cloud.points) kept.insert({p.x, {p.y, p.z}});
    PointCloud removed;
    for (const Vec3& p : cloud.points) {
        if (kept.find({p.x, {p.y, p.z}}) == kept.end()) removed.points.push_back(p);
    }
    REQUIRE(removed.size() == result.stats.removed);
    REQUIRE(removed.size() >= 2);

    const double removed_nn = mean_nn_distance(removed);
    double random_nn = 0.0;
    const int trials = 5;
    RngStream rng(99, "oboo", "random-baseline");
    for (int t = 0; t < trials; ++t) {
        PointCloud sample;
        std::vector<std::size_t> order(cloud.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = 0; i < removed.size(); ++i) {
            const std::size_t j = i + rng.uniform_index(order.size() - i);
            std::swap(order[i], order[j]);
            sample.points.push_back(cloud.points[order[i]]);
        }
        random_nn += mean_nn_distance(sample);
    }
    random_nn /= trials;
    CHECK(removed_nn <= random_nn);
}

TEST_CASE("djt displaces only the selected fraction within J_a + T_d") {
    const PointCloud cloud = hemisphere(1000, 8);
    const auto result = corrupt_cloud(cloud, Kind::djt, 0, "djt-case");
    CHECK(result.cloud.size() == cloud.size());
    CHECK(result.stats.displaced == 100);  // default fraction 0.1

    const double bound = result.spec.jitter + result.spec.trail;
    std::size_t moved = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double d = dist(cloud.points[i], result.cloud.points[i]);
        if (!(cloud.points[i] == result.cloud.points[i])) {
            ++moved;
            CHECK(d <= bound + 1e-12);
        }
    }
    CHECK(moved <= result.stats.displaced);

    Recipe zero;
    zero.djt_fraction = 0.0;
    const auto identity = corrupt_cloud(cloud, Kind::djt, 0, "djt-zero", zero);
    CHECK(same_points(identity.cloud, cloud));
}

TEST_CASE("tr preserves counts and pairwise distances") {
    const PointCloud cloud = hemisphere(400, 9);
    const auto result = corrupt_cloud(cloud, Kind::tr, 0, "tr-case");
    REQUIRE(result.cloud.size() == cloud.size());
    RngStream rng(0, "tr", "pairs");
    for (int k = 0; k < 300; ++k) {
        const std::size_t i = rng.uniform_index(cloud.size());
        const std::size_t j = rng.uniform_index(cloud.size());
        CHECK(std::abs(dist(cloud.points[i], cloud.points[j]) -
                       dist(result.cloud.points[i], result.cloud.points[j])) <= 1e-9);
    }

    Recipe pinned;
    pinned.pins["tr.theta_x"] = "0";
    pinned.pins["tr.theta_y"] = "0";
    pinned.pins["tr.theta_z"] = "0";
    const auto identity = corrupt_cloud(cloud, Kind::tr, 0, "tr-id", pinned);
    CHECK(same_points(identity.cloud, cloud));
}

TEST_CASE("is scales the AABB exactly and replays deterministically") {
    const PointCloud cloud = hemisphere(400, 10);
    Recipe pinned;
    pinned.pins["is.scale"] = "2";
    const auto doubled = corrupt_cloud(cloud, Kind::is, 0, "is-x2", pinned);
    const Vec3 before = geom::aabb(cloud).extent();
    const Vec3 after = geom::aabb(doubled.cloud).extent();
    for (int a = 0; a < 3; ++a) CHECK(after[a] == doctest::Approx(2.0 * before[a]).epsilon(1e-9));

    const auto once = corrupt_cloud(cloud, Kind::is, 42, "is-replay");
    const auto twice = corrupt_cloud(cloud, Kind::is, 42, "is-replay");
    CHECK(once.spec.scale == twice.spec.scale);
    CHECK(same_points(once.cloud, twice.cloud));

    Recipe unit;
    unit.pins["is.scale"] = "1";
    const auto identity = corrupt_cloud(cloud, Kind::is, 0, "is-id", unit);
    CHECK(same_points(identity.cloud, cloud));
}

TEST_CASE("rcc composes identities to the identity") {
    const PointCloud cloud = hemisphere(300, 11);
    Recipe recipe;
    recipe.pins["rcc.subset"] = "is,tr";
    recipe.pins["is.scale"] = "1";
    recipe.pins["tr.theta_x"] = "0";
    recipe.pins["tr.theta_y"] = "0";
    recipe.pins["tr.theta_z"] = "0";
    const auto result = corrupt_cloud(cloud, Kind::rcc, 0, "rcc-id", recipe);
    CHECK(same_points(result.cloud, cloud));
    REQUIRE(result.sub_specs.size() == 2);
    CHECK(result.sub_specs[0].kind == Kind::is);  // canonical order
    CHECK(result.sub_specs[1].kind == Kind::tr);
}

TEST_CASE("rcc equals manual sequential application of its recorded sub-specs") {
    const PointCloud cloud = chair(600, 12);
    const auto result = corrupt_cloud(cloud, Kind::rcc, 5, "rcc-replay");
    REQUIRE(result.sub_specs.size() >= 2);

    PointCloud current = cloud;
    for (const CorruptionSpec& sub : result.sub_specs) {
        RngStream rng(sub.seed);
        const auto step = apply(current, sub, rng);
        current = step.cloud;
    }
    CHECK(same_points(current, result.cloud));
}

TEST_CASE("every kind replays bit-identically under the same key") {
    const PointCloud cloud = chair(500, 13);
    for (Kind kind : kAllKinds) {
        const auto a = corrupt_cloud(cloud, kind, 7, "replay");
        const auto b = corrupt_cloud(cloud, kind, 7, "replay");
        CHECK(same_points(a.cloud, b.cloud));
        CHECK(a.spec.params_text() == b.spec.params_text());
    }
}

TEST_CASE("empty clouds are rejected by every corruption") {
    const PointCloud empty;
    for (Kind kind : kAllKinds) {
        CHECK_THROWS_AS(corrupt_cloud(empty, kind, 0, "empty"), EmptyCloudError);
    }
}

TEST_CASE("recipe parsing: knobs, pins, comments, and errors") {
    const Recipe r = Recipe::parse(
        "# toy recipe\n"
        "djt_fraction = 0.2\n"
        "occlusion_radius_factor = 3\n"
        "tr.theta_x = 1.5   # pinned\n"
        "eoi.point_fraction = 1/12\n");
    CHECK(r.djt_fraction == doctest::Approx(0.2));
    CHECK(r.occlusion_radius_factor == doctest::Approx(3.0));
    CHECK(r.pin_text("tr.theta_x").value() == "1.5");

    RngStream rng(0, "recipe", "pin");
    const auto spec = sample_params(Kind::eoi, rng, r);
    CHECK(spec.point_fraction == doctest::Approx(1.0 / 12).epsilon(1e-12));

    CHECK_THROWS_AS(Recipe::parse("no_such_knob = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(Recipe::parse("djt_fraction 0.1\n"), InvalidArgument);
    CHECK_THROWS_AS(Recipe::parse("djt_fraction = nope\n"), InvalidArgument);
}

TEST_CASE("oboo rejects removal of the whole cloud") {
    PointCloud tiny;
    tiny.points = {{0, 0, 0}, {1, 0, 0}};
    CorruptionSpec spec;
    spec.kind = Kind::oboo;
    spec.n_objects = 1;
    spec.point_fraction = 1.0 / 3.0;  // one point of two? round(0.667)=1 < 2, fine
    spec.distance = 0.1;
    RngStream rng(0, "oboo", "exhaust");
    CHECK_NOTHROW(apply_oboo(tiny, spec, rng));

    PointCloud one;
    one.points = {{0, 0, 0}};
    RngStream rng2(0, "oboo", "exhaust2");
    // round(1/3 * 1) = 0 removals allowed; force the error with a fraction
    // whose rounded count reaches the cloud size.
    PointCloud three;
    three.points = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    spec.point_fraction = 1.0 / 3.0;
    CHECK_NOTHROW(apply_oboo(three, spec, rng2));
}

TEST_CASE("eoi stays feasible on thin and degenerate clouds") {
    // Flat scans leave little room between the surface and the dilated box;
    // the placement shrinks the clutter shape rather than violating the
    // distance envelope or escaping the box.
    RngStream gen(0, "testcloud", "flat");
    PointCloud flat;
    for (int i = 0; i < 800; ++i) {
        const double x = gen.uniform(-0.5, 0.5);
        const double z = gen.uniform(-0.5, 0.5);
        flat.points.push_back({x, 0.0, z});
    }
    PointCloud line;
    for (int i = 0; i < 400; ++i) line.points.push_back({gen.uniform(-0.5, 0.5), 0.0, 0.0});

    for (const PointCloud* cloud : {&flat, &line}) {
        const NnIndex index(*cloud);
        const Aabb box = geom::aabb(*cloud);
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const auto result = corrupt_cloud(*cloud, Kind::eoi, seed, "eoi-thin");
            const Aabb dilated = box.dilated(result.spec.distance + 1e-9);
            double min_dist = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < result.cloud.size(); ++i) {
                if (result.cloud.label(i) != PointLabel::added) continue;
                min_dist = std::min(min_dist, index.nearest(result.cloud.points[i]).dist);
                CHECK(dilated.contains(result.cloud.points[i]));
            }
            CHECK(min_dist >= 0.05 * 0.95);
            CHECK(min_dist <= 0.2 * 1.05);
        }
    }
}
