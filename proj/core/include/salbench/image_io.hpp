#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "salbench/imaging.hpp"

namespace salbench::io {

// Decoded 8-bit pixels straight from a file.
struct Image8 {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 0;  // 1 or 3; alpha is dropped on decode
    std::vector<std::uint8_t> pixels;
};

// Decodes PNG, JPEG, BMP (uncompressed 24/32-bit) or binary PGM, chosen by
// file signature. Throws IoError on unreadable or unsupported files.
Image8 read_image8(const std::filesystem::path& path);

// Decodes any supported file as an sRGB-encoded 3-channel raster (gray
// sources are replicated into all channels).
imaging::RasterImage read_srgb_image(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const Image8& image);
void write_pgm(const std::filesystem::path& path, const Image8& image);

// Encoded size of `image` as PNG, without touching the file system.
std::vector<std::uint8_t> encode_png(const Image8& image);

}  // namespace salbench::io
