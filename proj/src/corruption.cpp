#include "pcc/corruption.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "pcc/geom.hpp"
#include "pcc/nn_index.hpp"
#include "pcc/primitives.hpp"

namespace pcc::corrupt {

namespace {

constexpr double kEoiDistLo = 0.05, kEoiDistHi = 0.2;
constexpr double kBiwDistLo = 0.01, kBiwDistHi = 0.05;
constexpr std::array<double, 4> kEoiFractions = {1.0 / 16, 1.0 / 12, 1.0 / 8, 1.0 / 4};
constexpr std::array<double, 6> kObooFractions = {1.0 / 8, 1.0 / 7, 1.0 / 6,
                                                  1.0 / 5, 1.0 / 4, 1.0 / 3};

void require_nonempty(const PointCloud& cloud, const char* who) {
    if (cloud.empty()) throw EmptyCloudError(std::string(who) + ": empty cloud");
}

std::string fmt(double v) {
    char tmp[40];
    std::snprintf(tmp, sizeof(tmp), "%.17g", v);
    return tmp;
}

bool in_interval(double v, double lo, double hi) { return v >= lo && v <= hi; }

template <std::size_t N>
bool in_set(double v, const std::array<double, N>& set) {
    for (double s : set) {
        if (std::abs(v - s) <= 1e-9) return true;
    }
    return false;
}

/// Pin values accept "a/b" fraction syntax so discrete fractions round-trip.
std::optional<double> numeric_pin(const Recipe& recipe, const std::string& key) {
    const auto text = recipe.pin_text(key);
    if (!text) return std::nullopt;
    const auto slash = text->find('/');
    if (slash != std::string::npos) {
        try {
            const double num = std::stod(text->substr(0, slash));
            const double den = std::stod(text->substr(slash + 1));
            if (den == 0.0) throw InvalidArgument("recipe pin '" + key + "': zero denominator");
            return num / den;
        } catch (const InvalidArgument&) {
            throw;
        } catch (const std::exception&) {
            throw InvalidArgument("recipe pin '" + key + "': bad fraction '" + *text + "'");
        }
    }
    return recipe.pin(key);
}

double draw_or_pin(RngStream& rng, double lo, double hi, const Recipe& recipe,
                   const std::string& key) {
    // The draw always happens so pinned and unpinned runs consume the same
    // stream positions.
    const double drawn = rng.uniform(lo, hi);
    const auto pinned = numeric_pin(recipe, key);
    return pinned ? *pinned : drawn;
}

template <std::size_t N>
double pick_or_pin(RngStream& rng, const std::array<double, N>& set, const Recipe& recipe,
                   const std::string& key) {
    const double drawn = set[rng.uniform_index(N)];
    const auto pinned = numeric_pin(recipe, key);
    return pinned ? *pinned : drawn;
}

int pick_int_or_pin(RngStream& rng, int lo, int hi, const Recipe& recipe,
                    const std::string& key) {
    const int drawn = lo + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(hi - lo + 1)));
    const auto pinned = numeric_pin(recipe, key);
    return pinned ? static_cast<int>(*pinned) : drawn;
}

double mean_spacing(const PointCloud& cloud, const Aabb& box) {
    const double d = mean_nn_distance(cloud);
    if (d > 0.0) return d;
    const double ext = box.max_extent();
    return ext > 0.0 ? 0.01 * ext : 1e-3;
}

/// Sample a random primitive, scale it to `shape_scale`, rotate it uniformly,
/// and translate it so its nearest sample sits at distance ~target_dist from
/// the object while staying inside the dilated object box.
PointCloud place_shape(const NnIndex& object, const Aabb& object_box, std::size_t n_points,
                       double target_dist, double shape_scale, RngStream& rng) {
    const geom::PrimitiveKind kind =
        geom::primitive_from_index(static_cast<int>(rng.uniform_index(geom::kPrimitiveCount)));
    PointCloud shape = geom::sample_primitive(kind, n_points, rng);
    for (Vec3& p : shape.points) p = p * shape_scale;
    const double rx = rng.uniform(0.0, 360.0);
    const double ry = rng.uniform(0.0, 360.0);
    const double rz = rng.uniform(0.0, 360.0);
    shape = geom::rotate(shape, rx, ry, rz);

    const Aabb box = object_box.dilated(target_dist);

    auto shape_box = [&]() { return geom::aabb(shape); };

    // Thin objects (flat scans) leave less room than the nominal shape size;
    // cap the shape so it can fit inside the dilated box at all.
    if (shape.size() > 1) {
        const Vec3 se = shape_box().extent();
        const Vec3 be = box.extent();
        double fit = 1.0;
        for (int a = 0; a < 3; ++a) {
            if (se[a] > be[a] && se[a] > 0.0) fit = std::min(fit, 0.999 * be[a] / se[a]);
        }
        if (fit < 1.0) shape = geom::scale(shape, std::max(fit, 1e-3));
    }
    auto translate = [&](const Vec3& t) {
        for (Vec3& p : shape.points) p += t;
    };
    // Clamp a candidate translation so the shape's box stays inside `box`.
    auto clamp_translation = [&](Vec3 t) {
        const Aabb sb = shape_box();
        for (int a = 0; a < 3; ++a) {
            const double lo = box.min[a] - sb.min[a];  // most negative allowed
            const double hi = box.max[a] - sb.max[a];  // most positive allowed
            // lo > hi means the shape overhangs this axis (rounding of the
            // fit cap); center it rather than drifting unbounded.
            t[a] = lo <= hi ? std::clamp(t[a], lo, hi) : 0.5 * (lo + hi);
        }
        return t;
    };
    auto min_dist_pair = [&](std::size_t& shape_idx) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_obj = 0;
        shape_idx = 0;
        for (std::size_t i = 0; i < shape.size(); ++i) {
            const NnIndex::Hit hit = object.nearest(shape.points[i]);
            if (hit.dist < best) {
                best = hit.dist;
                best_obj = hit.index;
                shape_idx = i;
            }
        }
        return std::pair{best, best_obj};
    };

    constexpr int kAnchors = 24;
    constexpr int kIters = 32;
    constexpr int kShrinkRounds = 3;
    const double tol = 0.05 * target_dist;

    std::vector<Vec3> best_points;
    double best_err = std::numeric_limits<double>::infinity();

    for (int round = 0; round < kShrinkRounds && best_err > tol; ++round) {
        if (round > 0 && shape.size() > 1) {
            // The distance target was unreachable at this size; try smaller.
            shape = geom::scale(shape, 0.5);
        }
        for (int attempt = 0; attempt < kAnchors; ++attempt) {
            const double ax = rng.uniform(box.min.x, box.max.x);
            const double ay = rng.uniform(box.min.y, box.max.y);
            const double az = rng.uniform(box.min.z, box.max.z);
            // Move the shape's current center to the anchor, keeping it in-box.
            const Vec3 center = shape_box().center();
            translate(clamp_translation(Vec3{ax, ay, az} - center));

            for (int it = 0; it < kIters; ++it) {
                std::size_t si = 0;
                const auto [d, oi] = min_dist_pair(si);
                if (std::abs(d - target_dist) <= tol) break;
                Vec3 step;
                if (d < 1e-12) {
                    step = rng.unit_vector() * target_dist;
                } else {
                    const Vec3 dir = (object.point(oi) - shape.points[si]) * (1.0 / d);
                    step = dir * (d - target_dist);
                }
                const Vec3 clamped = clamp_translation(step);
                translate(clamped);
                // If the clamp swallowed the whole step we are stuck on the wall.
                if (norm2(clamped - step) > 0.0 && norm2(clamped) < 1e-24) break;
            }
            // Score the attempt from its final state (the loop may have moved
            // the shape after the last measurement).
            std::size_t si_final = 0;
            const double err = std::abs(min_dist_pair(si_final).first - target_dist);
            if (err < best_err) {
                best_err = err;
                best_points = shape.points;
                if (err <= tol) break;
            }
        }
    }
    shape.points = best_points;
    return shape;
}

CorruptionSpec recorded_spec(const CorruptionSpec& spec, const RngStream& rng) {
    CorruptionSpec out = spec;
    out.seed = rng.key();
    return out;
}

}  // namespace

std::string_view kind_tag(Kind kind) {
    switch (kind) {
        case Kind::eoi: return "eoi";
        case Kind::biw: return "biw";
        case Kind::bif: return "bif";
        case Kind::oboo: return "oboo";
        case Kind::djt: return "djt";
        case Kind::tr: return "tr";
        case Kind::is: return "is";
        case Kind::rcc: return "rcc";
    }
    return "unknown";
}

std::optional<Kind> kind_from_tag(std::string_view tag) {
    for (Kind k : kAllKinds) {
        if (kind_tag(k) == tag) return k;
    }
    return std::nullopt;
}

std::size_t round_count(double x) {
    return static_cast<std::size_t>(std::floor(x + 0.5));
}

void CorruptionSpec::validate() const {
    const auto fail = [&](const std::string& msg) {
        throw InvalidArgument("CorruptionSpec(" + std::string(kind_tag(kind)) + "): " + msg);
    };
    switch (kind) {
        case Kind::eoi:
            if (n_objects < 1 || n_objects > 3) fail("n_objects must be in {1,2,3}");
            if (!in_set(point_fraction, kEoiFractions))
                fail("point_fraction must be one of 1/16, 1/12, 1/8, 1/4");
            if (!in_interval(distance, kEoiDistLo, kEoiDistHi))
                fail("distance must be in [0.05, 0.2]");
            break;
        case Kind::biw:
            if (!in_interval(distance, kBiwDistLo, kBiwDistHi))
                fail("distance must be in [0.01, 0.05]");
            break;
        case Kind::bif: break;
        case Kind::oboo:
            if (n_objects < 1 || n_objects > 4) fail("n_objects must be in {1,2,3,4}");
            if (!in_set(point_fraction, kObooFractions))
                fail("point_fraction must be one of 1/8 .. 1/3");
            if (!in_interval(distance, kEoiDistLo, kEoiDistHi))
                fail("distance must be in [0.05, 0.2]");
            break;
        case Kind::djt:
            if (!in_interval(jitter, 0.01, 0.05)) fail("jitter must be in [0.01, 0.05]");
            if (!in_interval(trail, 0.02, 0.04)) fail("trail must be in [0.02, 0.04]");
            break;
        case Kind::tr:
            if (!in_interval(theta_x, 0.0, 10.0) || !in_interval(theta_y, 0.0, 10.0) ||
                !in_interval(theta_z, 0.0, 10.0))
                fail("angles must be in [0, 10] degrees");
            break;
        case Kind::is:
            if (!in_interval(scale, 0.25, 2.0)) fail("scale must be in [0.25, 2]");
            break;
        case Kind::rcc: {
            if (subset.size() < 2 || subset.size() > 7) fail("subset size must be in [2, 7]");
            std::vector<Kind> seen;
            for (Kind k : subset) {
                if (k == Kind::rcc) fail("subset may not contain rcc");
                if (std::find(seen.begin(), seen.end(), k) != seen.end())
                    fail("subset members must be distinct");
                seen.push_back(k);
            }
            break;
        }
    }
}

std::string CorruptionSpec::params_text() const {
    switch (kind) {
        case Kind::eoi:
        case Kind::oboo:
            return "n_objects=" + std::to_string(n_objects) +
                   ",point_fraction=" + fmt(point_fraction) + ",distance=" + fmt(distance);
        case Kind::biw: return "distance=" + fmt(distance);
        case Kind::bif: return "";
        case Kind::djt: return "jitter=" + fmt(jitter) + ",trail=" + fmt(trail);
        case Kind::tr:
            return "theta_x=" + fmt(theta_x) + ",theta_y=" + fmt(theta_y) +
                   ",theta_z=" + fmt(theta_z);
        case Kind::is: return "scale=" + fmt(scale);
        case Kind::rcc: {
            std::string out = "subset=";
            for (std::size_t i = 0; i < subset.size(); ++i) {
                if (i) out += '+';
                out += kind_tag(subset[i]);
            }
            return out;
        }
    }
    return "";
}

CorruptionSpec sample_params(Kind kind, RngStream& rng, const Recipe& recipe) {
    CorruptionSpec spec;
    spec.kind = kind;
    spec.seed = rng.key();
    switch (kind) {
        case Kind::eoi:
            spec.n_objects = pick_int_or_pin(rng, 1, 3, recipe, "eoi.n_objects");
            spec.point_fraction = pick_or_pin(rng, kEoiFractions, recipe, "eoi.point_fraction");
            spec.distance = draw_or_pin(rng, kEoiDistLo, kEoiDistHi, recipe, "eoi.distance");
            break;
        case Kind::biw:
            spec.distance = draw_or_pin(rng, kBiwDistLo, kBiwDistHi, recipe, "biw.distance");
            break;
        case Kind::bif: break;
        case Kind::oboo:
            spec.n_objects = pick_int_or_pin(rng, 1, 4, recipe, "oboo.n_objects");
            spec.point_fraction = pick_or_pin(rng, kObooFractions, recipe, "oboo.point_fraction");
            spec.distance = draw_or_pin(rng, kEoiDistLo, kEoiDistHi, recipe, "oboo.distance");
            break;
        case Kind::djt:
            spec.jitter = draw_or_pin(rng, 0.01, 0.05, recipe, "djt.jitter");
            spec.trail = draw_or_pin(rng, 0.02, 0.04, recipe, "djt.trail");
            break;
        case Kind::tr:
            spec.theta_x = draw_or_pin(rng, 0.0, 10.0, recipe, "tr.theta_x");
            spec.theta_y = draw_or_pin(rng, 0.0, 10.0, recipe, "tr.theta_y");
            spec.theta_z = draw_or_pin(rng, 0.0, 10.0, recipe, "tr.theta_z");
            break;
        case Kind::is:
            spec.scale = draw_or_pin(rng, 0.25, 2.0, recipe, "is.scale");
            break;
        case Kind::rcc: {
            const std::size_t size = 2 + rng.uniform_index(6);
            std::vector<Kind> pool(std::begin(kRccOrder), std::end(kRccOrder));
            for (std::size_t i = 0; i < size; ++i) {
                const std::size_t j = i + rng.uniform_index(pool.size() - i);
                std::swap(pool[i], pool[j]);
            }
            pool.resize(size);
            if (const auto pinned = recipe.pin_text("rcc.subset")) {
                pool.clear();
                std::string token;
                for (char c : *pinned + ",") {
                    if (c == ',' || c == '+') {
                        if (!token.empty()) {
                            const auto k = kind_from_tag(token);
                            if (!k) throw InvalidArgument("rcc.subset: unknown kind '" + token + "'");
                            pool.push_back(*k);
                            token.clear();
                        }
                    } else {
                        token += c;
                    }
                }
            }
            // Store in canonical application order.
            std::vector<Kind> ordered;
            for (Kind k : kRccOrder) {
                if (std::find(pool.begin(), pool.end(), k) != pool.end()) ordered.push_back(k);
            }
            spec.subset = std::move(ordered);
            break;
        }
    }
    spec.validate();
    return spec;
}

CorruptionResult apply_eoi(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                           const Recipe& recipe) {
    require_nonempty(cloud, "apply_eoi");
    if (spec.kind != Kind::eoi) throw InvalidArgument("apply_eoi: wrong kind");
    spec.validate();

    const Aabb box = geom::aabb(cloud);
    const NnIndex index(cloud);
    const std::size_t total = round_count(spec.point_fraction * static_cast<double>(cloud.size()));
    const double shape_scale = recipe.primitive_scale * box.max_extent();

    CorruptionResult result;
    result.cloud = cloud;
    result.spec = recorded_spec(spec, rng);
    const std::size_t base = total / static_cast<std::size_t>(spec.n_objects);
    const std::size_t rem = total % static_cast<std::size_t>(spec.n_objects);
    for (int i = 0; i < spec.n_objects; ++i) {
        const std::size_t share = base + (static_cast<std::size_t>(i) < rem ? 1 : 0);
        if (share == 0) continue;
        const PointCloud shape =
            place_shape(index, box, share, spec.distance, shape_scale, rng);
        for (const Vec3& p : shape.points) result.cloud.push_back(p, PointLabel::added);
    }
    result.stats.added = result.cloud.size() - cloud.size();
    return result;
}

CorruptionResult apply_biw(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                           const Recipe& recipe) {
    require_nonempty(cloud, "apply_biw");
    if (spec.kind != Kind::biw) throw InvalidArgument("apply_biw: wrong kind");
    spec.validate();

    const Aabb box = geom::aabb(cloud);
    const Vec3 ext = box.extent();
    // The face with the largest area is perpendicular to the smallest extent.
    int axis = 0;
    for (int a = 1; a < 3; ++a) {
        if (ext[a] < ext[axis]) axis = a;
    }
    const int side = rng.uniform_index(2) == 0 ? -1 : 1;
    const double wall_coord =
        side < 0 ? box.min[axis] - spec.distance : box.max[axis] + spec.distance;

    const double density = mean_spacing(cloud, box);
    const double spacing = recipe.wall_spacing_factor * density;
    const double r_occ = recipe.occlusion_radius_factor * density;

    const int ua = (axis + 1) % 3;
    const int va = (axis + 2) % 3;
    const double eu = ext[ua];
    const double ev = ext[va];
    const std::size_t nu = std::max<std::size_t>(1, round_count(eu / spacing));
    const std::size_t nv = std::max<std::size_t>(1, round_count(ev / spacing));
    const double cu = nu > 0 ? eu / static_cast<double>(nu) : 0.0;
    const double cv = nv > 0 ? ev / static_cast<double>(nv) : 0.0;

    // Occlusion test runs against the object's orthogonal projection onto the wall.
    PointCloud projected = cloud;
    for (Vec3& p : projected.points) p[axis] = wall_coord;
    const NnIndex proj_index(projected);

    CorruptionResult result;
    result.cloud = cloud;
    result.spec = recorded_spec(spec, rng);
    for (std::size_t iu = 0; iu < nu; ++iu) {
        for (std::size_t iv = 0; iv < nv; ++iv) {
            const double ju = rng.uniform(-0.45, 0.45);
            const double jv = rng.uniform(-0.45, 0.45);
            Vec3 p;
            p[axis] = wall_coord;
            p[ua] = box.min[ua] + (static_cast<double>(iu) + 0.5 + ju) * cu;
            p[va] = box.min[va] + (static_cast<double>(iv) + 0.5 + jv) * cv;
            if (proj_index.nearest(p).dist >= r_occ) {
                result.cloud.push_back(p, PointLabel::added);
            }
        }
    }
    result.stats.added = result.cloud.size() - cloud.size();
    return result;
}

CorruptionResult apply_bif(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                           const Recipe& recipe) {
    require_nonempty(cloud, "apply_bif");
    if (spec.kind != Kind::bif) throw InvalidArgument("apply_bif: wrong kind");
    spec.validate();

    const Aabb box = geom::aabb(cloud);
    CorruptionResult result;
    result.cloud = cloud;
    result.spec = recorded_spec(spec, rng);

    // The floor appears only when the scan captured the bottom quarter of the
    // object; gate against the reference object frame (normalized units).
    const double gate_top =
        recipe.bif_ref_ymin + 0.25 * (recipe.bif_ref_ymax - recipe.bif_ref_ymin);
    if (box.min.y > gate_top) return result;

    const double floor_y = box.min.y;
    const double density = mean_spacing(cloud, box);
    const double spacing = recipe.wall_spacing_factor * density;
    const double r_occ = recipe.occlusion_radius_factor * density;

    // Footprint: the xz box dilated by 10% of each extent.
    const double ex = box.extent().x;
    const double ez = box.extent().z;
    const double x0 = box.min.x - 0.05 * ex;
    const double z0 = box.min.z - 0.05 * ez;
    const double fx = 1.1 * ex;
    const double fz = 1.1 * ez;
    const std::size_t nx = std::max<std::size_t>(1, round_count(fx / spacing));
    const std::size_t nz = std::max<std::size_t>(1, round_count(fz / spacing));
    const double cx = fx / static_cast<double>(nx);
    const double cz = fz / static_cast<double>(nz);

    PointCloud projected = cloud;
    for (Vec3& p : projected.points) p.y = floor_y;
    const NnIndex proj_index(projected);

    for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t iz = 0; iz < nz; ++iz) {
            const double jx = rng.uniform(-0.45, 0.45);
            const double jz = rng.uniform(-0.45, 0.45);
            const Vec3 p{x0 + (static_cast<double>(ix) + 0.5 + jx) * cx, floor_y,
                         z0 + (static_cast<double>(iz) + 0.5 + jz) * cz};
            if (proj_index.nearest(p).dist >= r_occ) {
                result.cloud.push_back(p, PointLabel::added);
            }
        }
    }
    result.stats.added = result.cloud.size() - cloud.size();
    return result;
}

CorruptionResult apply_oboo(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                            const Recipe& recipe) {
    require_nonempty(cloud, "apply_oboo");
    if (spec.kind != Kind::oboo) throw InvalidArgument("apply_oboo: wrong kind");
    spec.validate();

    const std::size_t n = cloud.size();
    const std::size_t removal = round_count(spec.point_fraction * static_cast<double>(n));
    if (removal >= n) throw InvalidArgument("apply_oboo: removal would exhaust the cloud");

    const Aabb box = geom::aabb(cloud);
    const NnIndex index(cloud);
    const double shape_scale = recipe.primitive_scale * box.max_extent();

    // Occluder regions are sampled primitive surfaces placed like E_OI shapes.
    std::vector<PointCloud> occluders;
    occluders.reserve(static_cast<std::size_t>(spec.n_objects));
    for (int i = 0; i < spec.n_objects; ++i) {
        occluders.push_back(place_shape(index, box,
                                        static_cast<std::size_t>(recipe.occluder_samples),
                                        spec.distance, shape_scale, rng));
    }

    std::vector<char> removed(n, 0);
    const std::size_t base = removal / static_cast<std::size_t>(spec.n_objects);
    const std::size_t rem = removal % static_cast<std::size_t>(spec.n_objects);
    for (int i = 0; i < spec.n_objects; ++i) {
        std::size_t quota = base + (static_cast<std::size_t>(i) < rem ? 1 : 0);
        if (quota == 0) continue;
        const NnIndex occ_index(occluders[static_cast<std::size_t>(i)]);
        std::vector<std::pair<double, std::size_t>> ranked;
        ranked.reserve(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (removed[j]) continue;
            ranked.emplace_back(occ_index.nearest(cloud.points[j]).dist2, j);
        }
        std::sort(ranked.begin(), ranked.end());
        quota = std::min(quota, ranked.size());
        for (std::size_t r = 0; r < quota; ++r) removed[ranked[r].second] = 1;
    }

    CorruptionResult result;
    result.spec = recorded_spec(spec, rng);
    result.cloud.points.reserve(n - removal);
    for (std::size_t j = 0; j < n; ++j) {
        if (removed[j]) continue;
        if (cloud.has_labels())
            result.cloud.push_back(cloud.points[j], cloud.labels[j]);
        else
            result.cloud.push_back(cloud.points[j]);
    }
    result.stats.removed = n - result.cloud.size();
    return result;
}

CorruptionResult apply_djt(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                           const Recipe& recipe) {
    require_nonempty(cloud, "apply_djt");
    if (spec.kind != Kind::djt) throw InvalidArgument("apply_djt: wrong kind");
    spec.validate();

    const std::size_t n = cloud.size();
    const std::size_t n_sel = round_count(recipe.djt_fraction * static_cast<double>(n));

    CorruptionResult result;
    result.cloud = cloud;
    result.spec = recorded_spec(spec, rng);
    if (n_sel == 0) return result;

    // Partial Fisher-Yates pick of n_sel distinct indices.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < n_sel; ++i) {
        const std::size_t j = i + rng.uniform_index(n - i);
        std::swap(order[i], order[j]);
    }
    std::vector<std::size_t> selected(order.begin(), order.begin() + static_cast<long>(n_sel));
    std::sort(selected.begin(), selected.end());

    const Vec3 trail_dir = rng.unit_vector();  // one direction per cloud
    for (std::size_t idx : selected) {
        const Vec3 jit_dir = rng.unit_vector();
        const double jit_mag = spec.jitter * std::cbrt(rng.uniform());
        const double along = rng.uniform(0.0, spec.trail);
        result.cloud.points[idx] += jit_dir * jit_mag + trail_dir * along;
    }
    result.stats.displaced = n_sel;
    return result;
}

CorruptionResult apply_tr(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                          const Recipe&) {
    require_nonempty(cloud, "apply_tr");
    if (spec.kind != Kind::tr) throw InvalidArgument("apply_tr: wrong kind");
    spec.validate();
    CorruptionResult result;
    result.cloud = geom::rotate(cloud, spec.theta_x, spec.theta_y, spec.theta_z);
    result.spec = recorded_spec(spec, rng);
    result.stats.displaced = cloud.size();
    return result;
}

CorruptionResult apply_is(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                          const Recipe&) {
    require_nonempty(cloud, "apply_is");
    if (spec.kind != Kind::is) throw InvalidArgument("apply_is: wrong kind");
    spec.validate();
    CorruptionResult result;
    result.cloud = geom::scale(cloud, spec.scale);
    result.spec = recorded_spec(spec, rng);
    result.stats.displaced = cloud.size();
    return result;
}

CorruptionResult apply_rcc(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                           const Recipe& recipe) {
    require_nonempty(cloud, "apply_rcc");
    if (spec.kind != Kind::rcc) throw InvalidArgument("apply_rcc: wrong kind");
    spec.validate();

    CorruptionResult result;
    result.spec = recorded_spec(spec, rng);
    result.cloud = cloud;
    for (Kind member : kRccOrder) {
        if (std::find(spec.subset.begin(), spec.subset.end(), member) == spec.subset.end())
            continue;
        const std::string tag(kind_tag(member));
        RngStream params_rng(rng.key().derived(tag + "/params"));
        CorruptionSpec sub = sample_params(member, params_rng, recipe);
        sub.seed = rng.key().derived(tag + "/apply");
        RngStream apply_rng(sub.seed);
        CorruptionResult step = apply(result.cloud, sub, apply_rng, recipe);
        result.cloud = std::move(step.cloud);
        result.sub_specs.push_back(step.spec);
        result.stats.added += step.stats.added;
        result.stats.removed += step.stats.removed;
        result.stats.displaced += step.stats.displaced;
    }
    return result;
}

CorruptionResult apply(const PointCloud& cloud, const CorruptionSpec& spec, RngStream& rng,
                       const Recipe& recipe) {
    switch (spec.kind) {
        case Kind::eoi: return apply_eoi(cloud, spec, rng, recipe);
        case Kind::biw: return apply_biw(cloud, spec, rng, recipe);
        case Kind::bif: return apply_bif(cloud, spec, rng, recipe);
        case Kind::oboo: return apply_oboo(cloud, spec, rng, recipe);
        case Kind::djt: return apply_djt(cloud, spec, rng, recipe);
        case Kind::tr: return apply_tr(cloud, spec, rng, recipe);
        case Kind::is: return apply_is(cloud, spec, rng, recipe);
        case Kind::rcc: return apply_rcc(cloud, spec, rng, recipe);
    }
    throw InvalidArgument("apply: unknown kind");
}

CorruptionResult corrupt_cloud(const PointCloud& cloud, Kind kind, std::uint64_t master_seed,
                               const std::string& object_id, const Recipe& recipe) {
    const std::string tag(kind_tag(kind));
    RngStream params_rng(master_seed, object_id, tag + "/params");
    CorruptionSpec spec = sample_params(kind, params_rng, recipe);
    spec.seed = RngKey{master_seed, object_id, tag + "/apply"};
    RngStream apply_rng(spec.seed);
    return apply(cloud, spec, apply_rng, recipe);
}

}  // namespace pcc::corrupt
