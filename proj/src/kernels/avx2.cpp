// Compiled with -mavx2 (no FMA: the scalar path must produce identical bits).

#include "colorsail/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

#include <limits>

namespace colorsail::kernels::avx2 {

#if defined(__AVX2__)

bool compiled() { return true; }

void nearest_colors(const ColorPlanes& queries, std::span<const Rgb> palette, std::span<std::uint32_t> index,
                    std::span<double> dist2)
{
    const std::size_t n = queries.size();
    const std::size_t body = n - n % 4;
    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());

    for (std::size_t q = 0; q < body; q += 4) {
        const __m256d qr = _mm256_loadu_pd(queries.r.data() + q);
        const __m256d qg = _mm256_loadu_pd(queries.g.data() + q);
        const __m256d qb = _mm256_loadu_pd(queries.b.data() + q);
        __m256d best = inf;
        __m256d best_idx = _mm256_setzero_pd();
        for (std::size_t j = 0; j < palette.size(); ++j) {
            const __m256d dr = _mm256_sub_pd(qr, _mm256_set1_pd(palette[j][0]));
            const __m256d dg = _mm256_sub_pd(qg, _mm256_set1_pd(palette[j][1]));
            const __m256d db = _mm256_sub_pd(qb, _mm256_set1_pd(palette[j][2]));
            const __m256d d = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dr, dr), _mm256_mul_pd(dg, dg)),
                                            _mm256_mul_pd(db, db));
            const __m256d closer = _mm256_cmp_pd(d, best, _CMP_LT_OQ);
            best = _mm256_blendv_pd(best, d, closer);
            best_idx = _mm256_blendv_pd(best_idx, _mm256_set1_pd(static_cast<double>(j)), closer);
        }
        alignas(32) double idx[4];
        _mm256_store_pd(idx, best_idx);
        _mm256_storeu_pd(dist2.data() + q, best);
        for (int k = 0; k < 4; ++k)
            index[q + k] = static_cast<std::uint32_t>(idx[k]);
    }
    scalar::nearest_colors(queries, palette, index, dist2, body, n);
}

void accumulate_weighted(std::span<const double> weight, const ColorPlanes& colors, ColorPlanes& out)
{
    const std::size_t n = weight.size();
    const std::size_t body = n - n % 4;
    for (std::size_t p = 0; p < body; p += 4) {
        const __m256d w = _mm256_loadu_pd(weight.data() + p);
        _mm256_storeu_pd(out.r.data() + p,
                         _mm256_add_pd(_mm256_loadu_pd(out.r.data() + p),
                                       _mm256_mul_pd(w, _mm256_loadu_pd(colors.r.data() + p))));
        _mm256_storeu_pd(out.g.data() + p,
                         _mm256_add_pd(_mm256_loadu_pd(out.g.data() + p),
                                       _mm256_mul_pd(w, _mm256_loadu_pd(colors.g.data() + p))));
        _mm256_storeu_pd(out.b.data() + p,
                         _mm256_add_pd(_mm256_loadu_pd(out.b.data() + p),
                                       _mm256_mul_pd(w, _mm256_loadu_pd(colors.b.data() + p))));
    }
    scalar::accumulate_weighted(weight, colors, out, body, n);
}

#else

bool compiled() { return false; }

void nearest_colors(const ColorPlanes& queries, std::span<const Rgb> palette, std::span<std::uint32_t> index,
                    std::span<double> dist2)
{
    scalar::nearest_colors(queries, palette, index, dist2, 0, queries.size());
}

void accumulate_weighted(std::span<const double> weight, const ColorPlanes& colors, ColorPlanes& out)
{
    scalar::accumulate_weighted(weight, colors, out, 0, weight.size());
}

#endif

} // namespace colorsail::kernels::avx2
