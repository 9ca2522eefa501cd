#pragma once

#include <filesystem>
#include <iosfwd>

#include "radarsplat/pointcloud.hpp"

namespace radarsplat {

enum class PlyEncoding { ascii, binary_little_endian };

/// PLY 1.0 with vertex properties, in order: float x, y, z, nx, ny, nz (normals
/// written as zero) and uchar red, green, blue. Coordinates are stored as
/// float32.
void export_ply(const PointCloud& cloud, std::ostream& out, PlyEncoding encoding);

/// Reads the vertex element of an ascii, binary_little_endian or
/// binary_big_endian PLY. Requires x, y, z; color defaults to mid-gray and
/// confidence (an optional `confidence` property) to 1. Other elements and
/// properties are skipped. Throws ParseError carrying the byte offset.
PointCloud import_ply(std::istream& in);

void save_ply(const PointCloud& cloud, const std::filesystem::path& path,
              PlyEncoding encoding);
PointCloud load_ply(const std::filesystem::path& path);

}  // namespace radarsplat
