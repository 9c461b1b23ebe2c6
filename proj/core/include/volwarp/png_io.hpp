#pragma once

#include <filesystem>

#include "volwarp/tensor.hpp"

namespace volwarp {

// 8-bit PNG import; values map to [0,1] by /255. Gray stays 1 channel, gray+alpha
// and palette images expand to RGB, RGBA keeps its alpha channel.
Image read_png(const std::filesystem::path& path);

// Writes 1, 3 or 4 channel images as 8-bit PNG. Values are clamped to [0,1]
// and rounded to the nearest of 256 levels.
void write_png(const std::filesystem::path& path, const Image& image);

}  // namespace volwarp
