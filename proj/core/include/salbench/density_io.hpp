#pragma once

#include <filesystem>

#include "salbench/fixmap.hpp"

namespace salbench::io {

// NPY (v1.0) interchange: little-endian float64, C order, shape (height, width).
void write_npy(const std::filesystem::path& path, const fixmap::DensityMap& map);
// Accepts <f8 or <f4, C order, shape (h, w), (h, w, 1) or (1, h, w).
fixmap::DensityMap read_npy(const std::filesystem::path& path);

// 8-bit visualization of the max-1 normalized map.
void write_density_png(const std::filesystem::path& path, const fixmap::DensityMap& map);

// Loads a saliency map stored as an image: gray level / 255 (RGB inputs are
// averaged), tagged raw.
fixmap::DensityMap read_density_image(const std::filesystem::path& path);

// Dispatches on extension: ".npy" -> read_npy, anything else -> image.
fixmap::DensityMap read_density(const std::filesystem::path& path);

}  // namespace salbench::io
