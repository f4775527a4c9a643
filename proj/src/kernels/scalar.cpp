#include <limits>

#include "colorsail/kernels.hpp"

namespace colorsail::kernels::scalar {

void nearest_colors(const ColorPlanes& queries, std::span<const Rgb> palette, std::span<std::uint32_t> index,
                    std::span<double> dist2, std::size_t begin, std::size_t end)
{
    for (std::size_t q = begin; q < end; ++q) {
        const double qr = queries.r[q], qg = queries.g[q], qb = queries.b[q];
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_idx = 0;
        for (std::size_t j = 0; j < palette.size(); ++j) {
            const double dr = qr - palette[j][0];
            const double dg = qg - palette[j][1];
            const double db = qb - palette[j][2];
            const double d = (dr * dr + dg * dg) + db * db;
            if (d < best) {
                best = d;
                best_idx = static_cast<std::uint32_t>(j);
            }
        }
        index[q] = best_idx;
        dist2[q] = best;
    }
}

void accumulate_weighted(std::span<const double> weight, const ColorPlanes& colors, ColorPlanes& out,
                         std::size_t begin, std::size_t end)
{
    for (std::size_t p = begin; p < end; ++p) {
        const double w = weight[p];
        out.r[p] += w * colors.r[p];
        out.g[p] += w * colors.g[p];
        out.b[p] += w * colors.b[p];
    }
}

} // namespace colorsail::kernels::scalar
