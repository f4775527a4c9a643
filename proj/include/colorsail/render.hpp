#pragma once

#include <cstdint>
#include <vector>

#include "colorsail/sail.hpp"

namespace colorsail {

/// Square RGBA rendering of the subdivided sail triangle on a fixed equilateral
/// layout: vertex 0 on top, vertex 1 bottom left, vertex 2 bottom right. Upright
/// patches take their grid-point color, downward patches their centroid color;
/// pixels outside the triangle are transparent.
struct SailImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgba;
};

SailImage render_sail(const ColorSail& sail, int size = 256);

/// Canonical grid index of the patch containing barycentric point b, or -1 outside.
int patch_index(int subdivision, double b0, double b1, double b2);

} // namespace colorsail
