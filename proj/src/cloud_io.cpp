#include "pcc/cloud_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace pcc::io {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

// %.9g round-trips any float32 exactly and stays compact.
void append_float(std::string& buf, float v) {
    char tmp[32];
    std::snprintf(tmp, sizeof(tmp), "%.9g", static_cast<double>(v));
    buf += tmp;
}

void append_double(std::string& buf, double v) {
    char tmp[40];
    std::snprintf(tmp, sizeof(tmp), "%.17g", v);
    buf += tmp;
}

double parse_double(const std::string& tok, const std::string& name) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw IoError("trailing junk in number '" + tok + "'", name);
        return v;
    } catch (const IoError&) {
        throw;
    } catch (const std::exception&) {
        throw IoError("bad number '" + tok + "'", name);
    }
}

std::size_t parse_count(const std::string& tok, const std::string& name) {
    try {
        return static_cast<std::size_t>(std::stoull(tok));
    } catch (const std::exception&) {
        throw IoError("bad count '" + tok + "'", name);
    }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing", path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed", path.string());
}

}  // namespace

PointCloud read_ply(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty PLY", name);
    if (line == "ply\r") line = "ply";
    if (line != "ply") throw IoError("missing 'ply' magic", name);

    std::size_t vertex_count = 0;
    bool have_vertex = false;
    bool in_vertex_element = false;
    int prop_count = 0;
    int ix = -1, iy = -1, iz = -1;
    bool header_done = false;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok[0] == "comment" || tok[0] == "obj_info") continue;
        if (tok[0] == "format") {
            if (tok.size() < 2 || tok[1] != "ascii")
                throw IoError("only ascii PLY is supported", name);
            continue;
        }
        if (tok[0] == "element") {
            if (tok.size() < 3) throw IoError("malformed element line", name);
            if (tok[1] == "vertex") {
                vertex_count = parse_count(tok[2], name);
                have_vertex = true;
                in_vertex_element = true;
            } else {
                if (parse_count(tok[2], name) != 0)
                    throw IoError("unsupported non-empty element '" + tok[1] + "'", name);
                in_vertex_element = false;
            }
            continue;
        }
        if (tok[0] == "property") {
            if (!in_vertex_element) continue;
            if (tok.size() < 3) throw IoError("malformed property line", name);
            const std::string& type = tok[1];
            if (type == "list") throw IoError("list vertex properties unsupported", name);
            if (type != "float" && type != "float32" && type != "double" && type != "float64")
                throw IoError("unsupported vertex property type '" + type + "'", name);
            const std::string& pname = tok[2];
            if (pname == "x") ix = prop_count;
            if (pname == "y") iy = prop_count;
            if (pname == "z") iz = prop_count;
            ++prop_count;
            continue;
        }
        if (tok[0] == "end_header") {
            header_done = true;
            break;
        }
        throw IoError("unexpected header line '" + line + "'", name);
    }
    if (!header_done) throw IoError("missing end_header", name);
    if (!have_vertex) throw IoError("missing 'element vertex'", name);
    if (ix < 0 || iy < 0 || iz < 0) throw IoError("missing x/y/z vertex properties", name);

    PointCloud cloud;
    cloud.points.reserve(vertex_count);
    while (cloud.points.size() < vertex_count) {
        if (!std::getline(in, line)) throw IoError("truncated vertex data", name);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok.size() < static_cast<std::size_t>(prop_count))
            throw IoError("short vertex row", name);
        Vec3 p{parse_double(tok[ix], name), parse_double(tok[iy], name),
               parse_double(tok[iz], name)};
        if (!finite(p)) throw IoError("non-finite coordinate", name);
        cloud.points.push_back(p);
    }
    return cloud;
}

void write_ply(std::ostream& out, const PointCloud& cloud) {
    std::string buf;
    buf.reserve(64 + cloud.size() * 32);
    buf += "ply\nformat ascii 1.0\nelement vertex ";
    buf += std::to_string(cloud.size());
    buf += "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
    for (const Vec3& p : cloud.points) {
        append_float(buf, static_cast<float>(p.x));
        buf += ' ';
        append_float(buf, static_cast<float>(p.y));
        buf += ' ';
        append_float(buf, static_cast<float>(p.z));
        buf += '\n';
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

PointCloud read_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open", path.string());
    return read_ply(in, path.string());
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
    std::ostringstream os;
    write_ply(os, cloud);
    write_file(path, os.str());
}

PointCloud read_xyz(std::istream& in, const std::string& name) {
    PointCloud cloud;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok.size() != 3) throw IoError("expected 3 values per line", name);
        Vec3 p{parse_double(tok[0], name), parse_double(tok[1], name),
               parse_double(tok[2], name)};
        if (!finite(p)) throw IoError("non-finite coordinate", name);
        cloud.points.push_back(p);
    }
    return cloud;
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
    std::string buf;
    buf.reserve(cloud.size() * 48);
    for (const Vec3& p : cloud.points) {
        append_double(buf, p.x);
        buf += ' ';
        append_double(buf, p.y);
        buf += ' ';
        append_double(buf, p.z);
        buf += '\n';
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

PointCloud read_xyz(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open", path.string());
    return read_xyz(in, path.string());
}

void write_xyz(const std::filesystem::path& path, const PointCloud& cloud) {
    std::ostringstream os;
    write_xyz(os, cloud);
    write_file(path, os.str());
}

bool is_cloud_file(const std::filesystem::path& path) {
    const std::string ext = lower(path.extension().string());
    return ext == ".ply" || ext == ".xyz";
}

PointCloud load_cloud(const std::filesystem::path& path) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".ply") return read_ply(path);
    if (ext == ".xyz") return read_xyz(path);
    throw IoError("unsupported cloud format '" + ext + "'", path.string());
}

void save_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".ply") return write_ply(path, cloud);
    if (ext == ".xyz") return write_xyz(path, cloud);
    throw IoError("unsupported cloud format '" + ext + "'", path.string());
}

}  // namespace pcc::io
