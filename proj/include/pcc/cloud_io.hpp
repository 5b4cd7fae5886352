#pragma once

#include <filesystem>
#include <iosfwd>

#include "pcc/point_cloud.hpp"

namespace pcc::io {

/// ASCII PLY with x/y/z float vertex properties. The writer emits coordinates
/// as 32-bit floats rendered in decimal; the reader tolerates comments, extra
/// vertex properties, and float/double property types.
PointCloud read_ply(const std::filesystem::path& path);
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_ply(std::istream& in, const std::string& name);
void write_ply(std::ostream& out, const PointCloud& cloud);

/// XYZ: one whitespace-separated "x y z" line per point; '#' starts a comment.
PointCloud read_xyz(const std::filesystem::path& path);
void write_xyz(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_xyz(std::istream& in, const std::string& name);
void write_xyz(std::ostream& out, const PointCloud& cloud);

/// Dispatch on extension (.ply / .xyz, case-insensitive).
PointCloud load_cloud(const std::filesystem::path& path);
void save_cloud(const std::filesystem::path& path, const PointCloud& cloud);
bool is_cloud_file(const std::filesystem::path& path);

}  // namespace pcc::io
