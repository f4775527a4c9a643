#include "colorsail/render.hpp"

#include <cmath>

#include "colorsail/error.hpp"

namespace colorsail {

int patch_index(int s, double b0, double b1, double b2)
{
    if (b0 < 0.0 || b1 < 0.0 || b2 < 0.0)
        return -1;
    const double sum = b0 + b1 + b2;
    const double x0 = s * b0 / sum, x1 = s * b1 / sum, x2 = s * b2 / sum;
    int fi = std::min(static_cast<int>(std::floor(x0)), s - 1);
    int fj = std::min(static_cast<int>(std::floor(x1)), s - 1);
    const int fk = std::min(static_cast<int>(std::floor(x2)), s - 1);

    if (fi + fj + fk >= s - 1) {
        fj = std::min(fj, s - 1 - fi);
        // Row i of the upright block starts after rows 0..i-1, which hold s, s-1, ... points.
        return fi * s - fi * (fi - 1) / 2 + fj;
    }
    if (fi + fj > s - 2)
        fj = s - 2 - fi;
    const int up = static_cast<int>(upright_count(s));
    const int m = s - 1;
    return up + fi * m - fi * (fi - 1) / 2 + fj;
}

SailImage render_sail(const ColorSail& sail, int size)
{
    if (size < 8)
        throw InvalidArgument("render size must be >= 8");
    const DecodedSail decoded = decode(sail, true, true);

    SailImage img;
    img.width = size;
    img.height = size;
    img.rgba.assign(static_cast<std::size_t>(size) * size * 4, 0);

    const double margin = size / 16.0;
    const double side = size - 2.0 * margin;
    const double tri_h = side * std::sqrt(3.0) / 2.0;
    const double top = (size - tri_h) / 2.0;
    const double ax = size / 2.0, ay = top;                 // vertex 0
    const double bx = margin, by = top + tri_h;             // vertex 1
    const double cx = size - margin, cy = top + tri_h;      // vertex 2
    const double det = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy);

    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            const double b0 = ((by - cy) * (px - cx) + (cx - bx) * (py - cy)) / det;
            const double b1 = ((cy - ay) * (px - cx) + (ax - cx) * (py - cy)) / det;
            const double b2 = 1.0 - b0 - b1;
            const int idx = patch_index(sail.subdivision, b0, b1, b2);
            if (idx < 0)
                continue;
            const Rgb& c = decoded.colors[static_cast<std::size_t>(idx)];
            std::uint8_t* out = &img.rgba[(static_cast<std::size_t>(y) * size + x) * 4];
            out[0] = quantize8(c[0]);
            out[1] = quantize8(c[1]);
            out[2] = quantize8(c[2]);
            out[3] = 255;
        }
    }
    return img;
}

} // namespace colorsail
