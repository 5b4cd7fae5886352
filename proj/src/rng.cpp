#include "pcc/rng.hpp"

#include <cmath>
#include <numbers>

namespace pcc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(const RngKey& key) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a(h, key.object_id);
    h ^= splitmix64(key.master_seed);
    h *= 0x100000001b3ULL;
    h = fnv1a(h, key.tag);
    return splitmix64(h);
}

}  // namespace

std::string RngKey::to_string() const {
    return std::to_string(master_seed) + ":" + object_id + ":" + tag;
}

RngStream::RngStream(const RngKey& key) : key_(key), engine_(derive_seed(key)) {}

RngStream::RngStream(std::uint64_t master_seed, std::string_view object_id, std::string_view tag)
    : RngStream(RngKey{master_seed, std::string(object_id), std::string(tag)}) {}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::size_t RngStream::uniform_index(std::size_t n) {
    if (n == 0) throw InvalidArgument("uniform_index: n must be >= 1");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return static_cast<std::size_t>(v % n);
}

double RngStream::normal() {
    // Box-Muller; 1-u keeps the log argument in (0, 1].
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec3 RngStream::unit_vector() {
    const double z = 1.0 - 2.0 * uniform();
    const double phi = 2.0 * std::numbers::pi * uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace pcc
