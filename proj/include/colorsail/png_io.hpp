#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "colorsail/raster.hpp"

namespace colorsail::png {

/// Decoded 8- or 16-bit image with 1 (gray), 3 (RGB) or 4 (RGBA) channels, row-major interleaved.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 8;
    std::vector<std::uint16_t> samples;
};

/// Reads any PNG; palette and sub-byte gray are expanded, bit depth kept at 8 or 16.
Image read(const std::filesystem::path& path);

/// Reads as RGB raster in [0,1]; alpha is dropped, gray replicated, 16-bit scaled.
Raster read_rgb(const std::filesystem::path& path);

// Writers use fixed compression settings and no timestamp chunk, so equal
// pixels always produce equal bytes.
void write_rgb8(const std::filesystem::path& path, const Raster& raster);
void write_rgba8(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& rgba);
void write_gray8(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& values);
void write_gray16(const std::filesystem::path& path, int width, int height, const std::vector<std::uint16_t>& values);

} // namespace colorsail::png
