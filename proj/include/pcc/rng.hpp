#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "pcc/point_cloud.hpp"

namespace pcc {

/// Identity of a deterministic random stream. Identical keys reproduce the
/// same draw sequence on any platform and under any thread schedule.
struct RngKey {
    std::uint64_t master_seed = 0;
    std::string object_id;
    std::string tag;

    RngKey derived(std::string_view suffix) const {
        RngKey k = *this;
        k.tag += '/';
        k.tag += suffix;
        return k;
    }
    std::string to_string() const;
    bool operator==(const RngKey& o) const = default;
};

/// Deterministic pseudo-random stream keyed by (master_seed, object_id, tag).
///
/// Built on mt19937_64 (whose output sequence the standard pins down) with
/// hand-rolled uniform/normal draws, so sequences are bit-reproducible across
/// platforms — the standard library distributions are not.
class RngStream {
public:
    explicit RngStream(const RngKey& key);
    RngStream(std::uint64_t master_seed, std::string_view object_id, std::string_view tag);

    const RngKey& key() const { return key_; }

    std::uint64_t next_u64();

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform();
    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer in [0, n). Rejection sampling, so unbiased. n >= 1.
    std::size_t uniform_index(std::size_t n);
    /// Standard normal via Box-Muller.
    double normal();
    /// Uniform direction on the unit sphere.
    Vec3 unit_vector();

private:
    RngKey key_;
    std::mt19937_64 engine_;
};

}  // namespace pcc
