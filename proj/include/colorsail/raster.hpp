#pragma once

#include <cstddef>
#include <vector>

#include "colorsail/color.hpp"

namespace colorsail {

/// Row-major RGB image with double channels in [0,1].
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;

    Raster() = default;
    Raster(int w, int h, Rgb fill = {0.0, 0.0, 0.0})
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill)
    {
    }

    std::size_t size() const { return pixels.size(); }
    bool empty() const { return pixels.empty(); }
    Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const Raster&) const = default;
};

/// Single-channel float plane, same layout as Raster.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Plane() = default;
    Plane(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill)
    {
    }

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Bilinear resample with pixel-center alignment; also used for upsampling alpha planes.
Raster resize_bilinear(const Raster& src, int width, int height);
Plane resize_bilinear(const Plane& src, int width, int height);

/// Area-averaging downscale so the longer side is at most `max_side`; returns a copy if already small.
Raster fit_within(const Raster& src, int max_side);

/// Quantized 8-bit interleaved RGB bytes of the raster (used for hashing and PNG export).
std::vector<unsigned char> to_rgb8(const Raster& r);

} // namespace colorsail
