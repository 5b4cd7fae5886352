#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcc/point_cloud.hpp"
#include "pcc/recipe.hpp"
#include "pcc/rng.hpp"

namespace pcc::corrupt {

/// The eight corruption categories. Tags are the short names used by the
/// CLI, manifests, and report categories.
enum class Kind { eoi, biw, bif, oboo, djt, tr, is, rcc };

inline constexpr Kind kAllKinds[] = {Kind::eoi, Kind::biw,  Kind::bif, Kind::oboo,
                                     Kind::djt, Kind::tr, Kind::is,  Kind::rcc};

/// Members eligible for a random combination, in the canonical application
/// order: geometric transforms first, then subtractive, then additive clutter.
inline constexpr Kind kRccOrder[] = {Kind::is,  Kind::tr,  Kind::djt, Kind::oboo,
                                     Kind::eoi, Kind::biw, Kind::bif};

std::string_view kind_tag(Kind kind);
std::optional<Kind> kind_from_tag(std::string_view tag);

/// A corruption plus its fully resolved parameter record and the stream key
/// that drives its application. Only the fields relevant to `kind` are
/// meaningful; validate() enforces the Table-2 style domains.
struct CorruptionSpec {
    Kind kind = Kind::tr;
    RngKey seed;

    int n_objects = 0;          // E_OI: {1,2,3}; O_BOO: {1,2,3,4}
    double point_fraction = 0;  // E_OI: {1/16,1/12,1/8,1/4}; O_BOO: {1/8..1/3}
    double distance = 0;        // E_OI, O_BOO: [0.05,0.2]; BI_W: [0.01,0.05]
    double jitter = 0;          // D_JT: [0.01,0.05]
    double trail = 0;           // D_JT: [0.02,0.04]
    double theta_x = 0, theta_y = 0, theta_z = 0;  // T_R: [0,10] degrees
    double scale = 1;           // I_S: [0.25,2]
    std::vector<Kind> subset;   // R_CC: 2..7 distinct non-rcc kinds

    void validate() const;
    /// Key=value rendering of the resolved parameters (manifest / sidecars).
    std::string params_text() const;
};

struct CorruptionStats {
    std::size_t added = 0;
    std::size_t removed = 0;
    std::size_t displaced = 0;
};

struct CorruptionResult {
    PointCloud cloud;
    CorruptionSpec spec;
    std::vector<CorruptionSpec> sub_specs;  // resolved members of an R_CC
    CorruptionStats stats;
};

/// Draw all parameters for `kind` from the stream, honoring recipe pins.
CorruptionSpec sample_params(Kind kind, RngStream& rng, const Recipe& recipe = {});

CorruptionResult apply_eoi(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                           const Recipe& recipe = {});
CorruptionResult apply_biw(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                           const Recipe& recipe = {});
CorruptionResult apply_bif(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                           const Recipe& recipe = {});
CorruptionResult apply_oboo(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                            const Recipe& recipe = {});
CorruptionResult apply_djt(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                           const Recipe& recipe = {});
CorruptionResult apply_tr(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                          const Recipe& recipe = {});
CorruptionResult apply_is(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                          const Recipe& recipe = {});
/// Applies the members of spec.subset in kRccOrder. Sub-parameters and
/// sub-apply draws run on streams derived from rng.key(), so each recorded
/// sub-spec replays independently.
CorruptionResult apply_rcc(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                           const Recipe& recipe = {});

/// Dispatch on spec.kind.
CorruptionResult apply(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                       const Recipe& recipe = {});

/// Sample-then-apply with the canonical stream layout: parameters come from
/// key tag "<tag>/params", application from "<tag>/apply" (recorded in
/// spec.seed). This is what the CLI and dataset builder run per item.
CorruptionResult corrupt_cloud(const PointCloud& cloud, Kind kind, std::uint64_t master_seed,
                               const std::string& object_id, const Recipe& recipe = {});

/// Half-up rounding used for all fractional point counts.
std::size_t round_count(double x);

}  // namespace pcc::corrupt
