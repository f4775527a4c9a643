#include <atomic>
#include <cstdlib>
#include <string>

#include "colorsail/error.hpp"
#include "colorsail/kernels.hpp"

namespace colorsail::kernels {

namespace {

bool cpu_has_avx2()
{
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa initial_isa()
{
    const Isa best = detected_isa();
    if (const char* env = std::getenv("COLORSAIL_ISA")) {
        const std::string v(env);
        if (v == "scalar")
            return Isa::scalar;
        if (v == "avx2" && best == Isa::avx2)
            return Isa::avx2;
    }
    return best;
}

std::atomic<int>& active_slot()
{
    static std::atomic<int> slot{static_cast<int>(initial_isa())};
    return slot;
}

void check_sizes(std::size_t queries, std::size_t index, std::size_t dist2)
{
    if (index != queries || dist2 != queries)
        throw InvalidArgument("nearest_colors: output spans must match query count");
}

} // namespace

std::string_view to_string(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa()
{
    static const Isa isa = (avx2::compiled() && cpu_has_avx2()) ? Isa::avx2 : Isa::scalar;
    return isa;
}

Isa active_isa() { return static_cast<Isa>(active_slot().load(std::memory_order_relaxed)); }

void set_active_isa(Isa isa)
{
    if (isa == Isa::avx2 && detected_isa() != Isa::avx2)
        throw InvalidArgument("AVX2 kernels are not available on this machine");
    active_slot().store(static_cast<int>(isa), std::memory_order_relaxed);
}

ColorPlanes::ColorPlanes(std::span<const Rgb> colors) : ColorPlanes(colors.size())
{
    for (std::size_t i = 0; i < colors.size(); ++i)
        set(i, colors[i]);
}

void ColorPlanes::resize(std::size_t n)
{
    r.resize(n);
    g.resize(n);
    b.resize(n);
}

void nearest_colors(const ColorPlanes& queries, std::span<const Rgb> palette, std::span<std::uint32_t> index,
                    std::span<double> dist2)
{
    check_sizes(queries.size(), index.size(), dist2.size());
    if (palette.empty())
        throw InvalidArgument("nearest_colors: empty palette");
    if (active_isa() == Isa::avx2)
        avx2::nearest_colors(queries, palette, index, dist2);
    else
        scalar::nearest_colors(queries, palette, index, dist2, 0, queries.size());
}

void accumulate_weighted(std::span<const double> weight, const ColorPlanes& colors, ColorPlanes& out)
{
    if (colors.size() != weight.size() || out.size() != weight.size())
        throw InvalidArgument("accumulate_weighted: size mismatch");
    if (active_isa() == Isa::avx2)
        avx2::accumulate_weighted(weight, colors, out);
    else
        scalar::accumulate_weighted(weight, colors, out, 0, weight.size());
}

} // namespace colorsail::kernels
