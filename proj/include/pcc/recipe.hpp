#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace pcc::corrupt {

/// Tunable knobs of the corruption generator plus optional pins that replace
/// sampling for individual corruption parameters (for reproducible tests).
///
/// File format: one `key = value` per line, '#' comments. Knob keys are the
/// field names below; pin keys are dotted, e.g. `tr.theta_x = 0`,
/// `is.scale = 1`, `eoi.n_objects = 2`, `rcc.subset = is,tr`.
struct Recipe {
    double djt_fraction = 0.1;          // fraction of points D_JT displaces
    double occlusion_radius_factor = 2.0;  // r_occ = factor x mean NN distance
    double primitive_scale = 0.25;      // clutter size / largest AABB extent
    double wall_spacing_factor = 1.0;   // wall grid spacing = factor x mean NN distance
    double bif_ref_ymin = -0.5;         // floor-gate reference frame (normalized units)
    double bif_ref_ymax = 0.5;
    int occluder_samples = 256;         // surface samples per O_BOO occluder

    std::map<std::string, std::string> pins;

    std::optional<double> pin(const std::string& key) const;
    std::optional<std::string> pin_text(const std::string& key) const;

    static Recipe parse(const std::string& text, const std::string& name = "<recipe>");
    static Recipe parse_file(const std::filesystem::path& path);
};

}  // namespace pcc::corrupt
