#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "colorsail/color.hpp"

// Data-parallel inner loops. Every kernel has a scalar reference and an AVX2
// variant; both perform the same IEEE operations in the same order, so results
// are bit-identical and the choice of variant never changes an output.

namespace colorsail::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Best variant this CPU supports.
Isa detected_isa();
/// Variant currently used by the dispatching entry points. Honors the
/// COLORSAIL_ISA environment variable ("scalar" or "avx2") on first use.
Isa active_isa();
/// Forces a variant; throws InvalidArgument if the CPU lacks it.
void set_active_isa(Isa isa);

/// Structure-of-arrays color list.
struct ColorPlanes {
    std::vector<double> r, g, b;

    ColorPlanes() = default;
    explicit ColorPlanes(std::size_t n) : r(n, 0.0), g(n, 0.0), b(n, 0.0) {}
    explicit ColorPlanes(std::span<const Rgb> colors);

    std::size_t size() const { return r.size(); }
    void resize(std::size_t n);
    Rgb get(std::size_t i) const { return {r[i], g[i], b[i]}; }
    void set(std::size_t i, const Rgb& c) { r[i] = c[0]; g[i] = c[1]; b[i] = c[2]; }
};

/// For every query, the index of the nearest palette color (squared Euclidean,
/// ties to the lowest index) and that squared distance.
void nearest_colors(const ColorPlanes& queries, std::span<const Rgb> palette, std::span<std::uint32_t> index,
                    std::span<double> dist2);

/// out[p] += weight[p] * colors[p], channel-wise.
void accumulate_weighted(std::span<const double> weight, const ColorPlanes& colors, ColorPlanes& out);

namespace scalar {
void nearest_colors(const ColorPlanes& queries, std::span<const Rgb> palette, std::span<std::uint32_t> index,
                    std::span<double> dist2, std::size_t begin, std::size_t end);
void accumulate_weighted(std::span<const double> weight, const ColorPlanes& colors, ColorPlanes& out,
                         std::size_t begin, std::size_t end);
} // namespace scalar

namespace avx2 {
bool compiled();
void nearest_colors(const ColorPlanes& queries, std::span<const Rgb> palette, std::span<std::uint32_t> index,
                    std::span<double> dist2);
void accumulate_weighted(std::span<const double> weight, const ColorPlanes& colors, ColorPlanes& out);
} // namespace avx2

} // namespace colorsail::kernels
