#include "pcc/recipe.hpp"

#include <fstream>
#include <sstream>

#include "pcc/errors.hpp"

namespace pcc::corrupt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value, const std::string& name) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument(name + ": bad value for '" + key + "': '" + value + "'");
    }
}

}  // namespace

std::optional<double> Recipe::pin(const std::string& key) const {
    const auto it = pins.find(key);
    if (it == pins.end()) return std::nullopt;
    return to_double(key, it->second, "recipe pin");
}

std::optional<std::string> Recipe::pin_text(const std::string& key) const {
    const auto it = pins.find(key);
    if (it == pins.end()) return std::nullopt;
    return it->second;
}

Recipe Recipe::parse(const std::string& text, const std::string& name) {
    Recipe r;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument(name + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw InvalidArgument(name + ":" + std::to_string(lineno) + ": empty key");

        if (key.find('.') != std::string::npos) {
            r.pins[key] = value;
        } else if (key == "djt_fraction") {
            r.djt_fraction = to_double(key, value, name);
        } else if (key == "occlusion_radius_factor") {
            r.occlusion_radius_factor = to_double(key, value, name);
        } else if (key == "primitive_scale") {
            r.primitive_scale = to_double(key, value, name);
        } else if (key == "wall_spacing_factor") {
            r.wall_spacing_factor = to_double(key, value, name);
        } else if (key == "bif_ref_ymin") {
            r.bif_ref_ymin = to_double(key, value, name);
        } else if (key == "bif_ref_ymax") {
            r.bif_ref_ymax = to_double(key, value, name);
        } else if (key == "occluder_samples") {
            r.occluder_samples = static_cast<int>(to_double(key, value, name));
        } else {
            throw InvalidArgument(name + ": unknown recipe key '" + key + "'");
        }
    }
    if (r.djt_fraction < 0.0 || r.djt_fraction > 1.0)
        throw InvalidArgument(name + ": djt_fraction must be in [0, 1]");
    if (r.occluder_samples < 1) throw InvalidArgument(name + ": occluder_samples must be >= 1");
    return r;
}

Recipe Recipe::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open recipe", path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str(), path.string());
}

}  // namespace pcc::corrupt
