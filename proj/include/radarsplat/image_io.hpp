#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "radarsplat/splat.hpp"

namespace radarsplat {

/// 8-bit RGB, round(clamp(v, 0, 1) * 255).
std::vector<std::uint8_t> quantize(const Image& img);

/// Binary PPM (P6, maxval 255).
void write_ppm(const Image& img, std::ostream& out);

/// PNG when the extension is .png, PPM otherwise.
void save_image(const Image& img, const std::filesystem::path& path);

}  // namespace radarsplat
