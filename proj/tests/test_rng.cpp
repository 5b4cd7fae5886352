#include "doctest.h"

#include <set>

#include "pcc/rng.hpp"

using namespace pcc;

TEST_CASE("identical keys reproduce identical sequences") {
    RngStream a(42, "train/chair_17", "eoi/apply");
    RngStream b(42, "train/chair_17", "eoi/apply");
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
}

TEST_CASE("any key component changes the stream") {
    RngStream base(42, "obj", "tag");
    RngStream seed_diff(43, "obj", "tag");
    RngStream obj_diff(42, "obj2", "tag");
    RngStream tag_diff(42, "obj", "tag2");
    const auto v = base.next_u64();
    CHECK(v != seed_diff.next_u64());
    CHECK(v != obj_diff.next_u64());
    CHECK(v != tag_diff.next_u64());
}

TEST_CASE("uniform stays in [0,1) and fills the range") {
    RngStream rng(0, "u", "u");
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double v = rng.uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("uniform_index covers all buckets and rejects n=0") {
    RngStream rng(7, "idx", "idx");
    std::set<std::size_t> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(rng.uniform_index(7));
    CHECK(seen.size() == 7);
    CHECK(*seen.rbegin() == 6);
    CHECK_THROWS_AS(rng.uniform_index(0), InvalidArgument);
}

TEST_CASE("unit vectors have unit norm") {
    RngStream rng(1, "dir", "dir");
    for (int i = 0; i < 100; ++i) {
        CHECK(norm(rng.unit_vector()) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("derived keys nest tags") {
    const RngKey key{5, "obj", "rcc/apply"};
    const RngKey sub = key.derived("is/params");
    CHECK(sub.master_seed == 5);
    CHECK(sub.object_id == "obj");
    CHECK(sub.tag == "rcc/apply/is/params");
}

TEST_CASE("normal draws have sane moments") {
    RngStream rng(3, "n", "n");
    double sum = 0.0, sum2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal();
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("golden sequence values pin the stream derivation") {
    // Frozen from the initial implementation; a change here silently breaks
    // reproducibility of previously generated datasets.
    RngStream a(0, "train/obj_0", "eoi/apply");
    CHECK(a.next_u64() == 2825094199201459113ULL);
    CHECK(a.next_u64() == 12208743795679153672ULL);
    CHECK(a.next_u64() == 3393614338901881505ULL);

    RngStream b(123456789, "val/chair", "rcc/apply/is/params");
    CHECK(b.uniform() == 0.53001288120517887);
    CHECK(b.uniform() == 0.47247287480719913);
    CHECK(b.uniform_index(12) == 7);
    CHECK(b.uniform_index(12) == 10);
    CHECK(b.uniform_index(12) == 9);
}
