#pragma once

#include <optional>
#include <string_view>

#include "pcc/point_cloud.hpp"
#include "pcc/rng.hpp"

namespace pcc::geom {

/// The basic-shape set used by clutter and occluder corruptions. 2D shapes are
/// filled planar regions in the z=0 plane; 3D shapes are boundary surfaces.
/// Canonical pose: centered at the origin with unit maximum extent, y up.
enum class PrimitiveKind {
    circle,
    square,
    rectangle,
    triangle,
    ellipse,
    hexagon,
    diamond,
    parallelogram,
    cylinder,
    sphere,
    cube,
    pyramid,
};

inline constexpr int kPrimitiveCount = 12;

std::string_view primitive_name(PrimitiveKind kind);
std::optional<PrimitiveKind> primitive_from_name(std::string_view name);
PrimitiveKind primitive_from_index(int idx);

/// n points sampled uniformly by area on the primitive in canonical pose.
/// Requires n >= 1.
PointCloud sample_primitive(PrimitiveKind kind, std::size_t n, RngStream& rng);

}  // namespace pcc::geom
