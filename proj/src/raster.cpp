#include "colorsail/raster.hpp"

#include <algorithm>
#include <cmath>

#include "colorsail/error.hpp"

namespace colorsail {

namespace {

struct Tap {
    int i0, i1;
    double t;
};

std::vector<Tap> bilinear_taps(int src, int dst)
{
    std::vector<Tap> taps(static_cast<std::size_t>(dst));
    const double scale = static_cast<double>(src) / dst;
    for (int x = 0; x < dst; ++x) {
        double s = (x + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        const int i0 = static_cast<int>(std::floor(s));
        const int i1 = std::min(i0 + 1, src - 1);
        taps[x] = {i0, i1, s - i0};
    }
    return taps;
}

// Fractional coverage of source cells by each destination cell.
std::vector<std::vector<std::pair<int, double>>> area_taps(int src, int dst)
{
    std::vector<std::vector<std::pair<int, double>>> taps(static_cast<std::size_t>(dst));
    const double scale = static_cast<double>(src) / dst;
    for (int x = 0; x < dst; ++x) {
        const double a = x * scale;
        const double b = (x + 1) * scale;
        for (int i = static_cast<int>(std::floor(a)); i < std::min(src, static_cast<int>(std::ceil(b))); ++i) {
            const double cover = std::min(b, i + 1.0) - std::max(a, static_cast<double>(i));
            if (cover > 0.0)
                taps[x].push_back({i, cover / scale});
        }
    }
    return taps;
}

void check_dims(int w, int h)
{
    if (w < 1 || h < 1)
        throw InvalidArgument("resize target must be at least 1x1");
}

} // namespace

Raster resize_bilinear(const Raster& src, int width, int height)
{
    check_dims(width, height);
    if (src.empty())
        throw InvalidArgument("resize of an empty raster");
    const auto tx = bilinear_taps(src.width, width);
    const auto ty = bilinear_taps(src.height, height);
    Raster out(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Rgb top = (1.0 - tx[x].t) * src.at(tx[x].i0, ty[y].i0) + tx[x].t * src.at(tx[x].i1, ty[y].i0);
            const Rgb bot = (1.0 - tx[x].t) * src.at(tx[x].i0, ty[y].i1) + tx[x].t * src.at(tx[x].i1, ty[y].i1);
            out.at(x, y) = (1.0 - ty[y].t) * top + ty[y].t * bot;
        }
    }
    return out;
}

Plane resize_bilinear(const Plane& src, int width, int height)
{
    check_dims(width, height);
    if (src.values.empty())
        throw InvalidArgument("resize of an empty plane");
    const auto tx = bilinear_taps(src.width, width);
    const auto ty = bilinear_taps(src.height, height);
    Plane out(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double top = (1.0 - tx[x].t) * src.at(tx[x].i0, ty[y].i0) + tx[x].t * src.at(tx[x].i1, ty[y].i0);
            const double bot = (1.0 - tx[x].t) * src.at(tx[x].i0, ty[y].i1) + tx[x].t * src.at(tx[x].i1, ty[y].i1);
            out.at(x, y) = (1.0 - ty[y].t) * top + ty[y].t * bot;
        }
    }
    return out;
}

Raster fit_within(const Raster& src, int max_side)
{
    if (max_side < 1)
        throw InvalidArgument("max_side must be >= 1");
    const int longest = std::max(src.width, src.height);
    if (longest <= max_side)
        return src;
    const double scale = static_cast<double>(max_side) / longest;
    const int w = std::max(1, static_cast<int>(std::lround(src.width * scale)));
    const int h = std::max(1, static_cast<int>(std::lround(src.height * scale)));
    const auto tx = area_taps(src.width, w);
    const auto ty = area_taps(src.height, h);

    Raster rows(w, src.height);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < w; ++x) {
            Rgb acc{0.0, 0.0, 0.0};
            for (const auto& [i, wt] : tx[x])
                acc = acc + wt * src.at(i, y);
            rows.at(x, y) = acc;
        }
    Raster out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            Rgb acc{0.0, 0.0, 0.0};
            for (const auto& [j, wt] : ty[y])
                acc = acc + wt * rows.at(x, j);
            out.at(x, y) = clamp01(acc);
        }
    return out;
}

std::vector<unsigned char> to_rgb8(const Raster& r)
{
    std::vector<unsigned char> bytes;
    bytes.reserve(r.size() * 3);
    for (const auto& p : r.pixels)
        for (double c : p)
            bytes.push_back(quantize8(c));
    return bytes;
}

} // namespace colorsail
