#include "colorsail/metrics.hpp"

#include <cmath>

#include "colorsail/error.hpp"
#include "colorsail/kernels.hpp"

namespace colorsail {

namespace {

void check_inputs(std::span<const WeightedColor> targets, std::span<const Rgb> palette)
{
    if (palette.empty())
        throw InvalidArgument("metric needs a nonempty palette");
    if (targets.empty())
        throw InvalidArgument("metric needs nonempty targets");
}

double total_weight(std::span<const WeightedColor> targets)
{
    double t = 0.0;
    for (const auto& tc : targets) {
        if (!(tc.weight >= 0.0))
            throw InvalidArgument("target weights must be >= 0");
        t += tc.weight;
    }
    if (!(t > 0.0))
        throw EmptyDistribution("targets have zero total weight");
    return t;
}

kernels::ColorPlanes planes_of(std::span<const WeightedColor> targets)
{
    kernels::ColorPlanes planes(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
        planes.set(i, targets[i].color);
    return planes;
}

Rgb lab_as_triple(const Rgb& c)
{
    const LabColor lab = srgb_to_lab(c);
    return {lab.L, lab.a, lab.b};
}

} // namespace

double e_l2(std::span<const WeightedColor> targets, std::span<const Rgb> palette)
{
    check_inputs(targets, palette);
    const double total = total_weight(targets);
    const auto planes = planes_of(targets);
    std::vector<std::uint32_t> index(targets.size());
    std::vector<double> dist2(targets.size());
    kernels::nearest_colors(planes, palette, index, dist2);
    double sum = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i)
        sum += targets[i].weight * std::sqrt(dist2[i]);
    return sum / total;
}

double r_percent(std::span<const WeightedColor> targets, std::span<const Rgb> palette, double delta)
{
    check_inputs(targets, palette);
    if (!(delta > 0.0))
        throw InvalidArgument("r_percent: delta must be > 0");
    const double total = total_weight(targets);

    // Lab coordinates in the same SoA layout, so the nearest search runs in Lab.
    kernels::ColorPlanes planes(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
        planes.set(i, lab_as_triple(targets[i].color));
    std::vector<Rgb> palette_lab;
    palette_lab.reserve(palette.size());
    for (const auto& c : palette)
        palette_lab.push_back(lab_as_triple(c));

    std::vector<std::uint32_t> index(targets.size());
    std::vector<double> dist2(targets.size());
    kernels::nearest_colors(planes, palette_lab, index, dist2);
    double good = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i)
        if (std::sqrt(dist2[i]) < delta)
            good += targets[i].weight;
    return good / total;
}

double e_kl(const ColorHistogram& sail_hist, const ColorHistogram& image_hist, double epsilon)
{
    if (sail_hist.bins_per_axis() != image_hist.bins_per_axis())
        throw InvalidArgument("e_kl: histograms have different bin counts");
    const double sail_total = sail_hist.total();
    const double image_total = image_hist.total();
    if (!(sail_total > 0.0) || !(image_total > 0.0))
        throw EmptyDistribution("e_kl: empty histogram");
    const double smoothed_total = 1.0 + epsilon * static_cast<double>(image_hist.bin_count());
    double kl = 0.0;
    for (std::size_t b = 0; b < sail_hist.bin_count(); ++b) {
        const double p = sail_hist.mass(b) / sail_total;
        if (p > 0.0) {
            const double q = (image_hist.mass(b) / image_total + epsilon) / smoothed_total;
            kl += p * std::log(p / q);
        }
    }
    return kl;
}

FitLoss evaluate_palette(std::span<const WeightedColor> targets, std::span<const Rgb> palette,
                         const ColorHistogram& image_hist, double lambda, double delta)
{
    FitLoss loss;
    loss.lambda = lambda;
    loss.e_l2 = e_l2(targets, palette);
    loss.r_percent = r_percent(targets, palette, delta);
    loss.e_kl = e_kl(sail_histogram(palette, image_hist.bins_per_axis()), image_hist);
    loss.combined = loss.e_l2 + lambda * loss.e_kl;
    return loss;
}

FitLoss combined_loss(std::span<const WeightedColor> targets, const ColorSail& sail, const ColorHistogram& image_hist,
                      double lambda, double delta)
{
    const DecodedSail decoded = decode(sail, true, false);
    return evaluate_palette(targets, decoded.colors, image_hist, lambda, delta);
}

std::vector<WeightedColor> pixel_targets(const Raster& image)
{
    std::vector<WeightedColor> t;
    t.reserve(image.size());
    for (const auto& p : image.pixels)
        t.push_back({p, 1.0});
    return t;
}

} // namespace colorsail
