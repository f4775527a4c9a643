#include "colorsail/colorimetry.hpp"

#include <algorithm>
#include <cmath>

#include "colorsail/error.hpp"
#include "colorsail/sail.hpp"

namespace colorsail {

namespace {

double srgb_to_linear(double c)
{
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t)
{
    constexpr double eps = 216.0 / 24389.0;
    constexpr double kappa = 24389.0 / 27.0;
    return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
}

// White point implied by the sRGB matrix rows, so (1,1,1) maps to L=100, a=b=0.
constexpr double kWhiteX = 0.4124564 + 0.3575761 + 0.1804375;
constexpr double kWhiteY = 0.2126729 + 0.7151522 + 0.0721750;
constexpr double kWhiteZ = 0.0193339 + 0.1191920 + 0.9503041;

} // namespace

LabColor srgb_to_lab(const Rgb& rgb)
{
    const double r = srgb_to_linear(rgb[0]);
    const double g = srgb_to_linear(rgb[1]);
    const double b = srgb_to_linear(rgb[2]);
    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

ColorHistogram::ColorHistogram(int bins_per_axis) : n_(bins_per_axis)
{
    if (bins_per_axis < 1)
        throw InvalidArgument("histogram needs at least one bin per axis");
    const auto count = static_cast<std::size_t>(n_) * n_ * n_;
    mass_.assign(count, 0.0);
    color_sum_.assign(count, Rgb{0.0, 0.0, 0.0});
    vote_weight_.assign(count, 0.0);
}

int ColorHistogram::channel_bin(double c, int n)
{
    if (!(c > 0.0))
        return 0;
    const double scaled = std::floor(c * n);
    return scaled >= n - 1 ? n - 1 : static_cast<int>(scaled);
}

std::size_t ColorHistogram::bin_of(const Rgb& c) const
{
    const auto r = static_cast<std::size_t>(channel_bin(c[0], n_));
    const auto g = static_cast<std::size_t>(channel_bin(c[1], n_));
    const auto b = static_cast<std::size_t>(channel_bin(c[2], n_));
    return (r * n_ + g) * n_ + b;
}

Rgb ColorHistogram::bin_center(std::size_t bin) const
{
    const auto n = static_cast<std::size_t>(n_);
    const double b = static_cast<double>(bin % n);
    const double g = static_cast<double>((bin / n) % n);
    const double r = static_cast<double>(bin / (n * n));
    return {(r + 0.5) / n_, (g + 0.5) / n_, (b + 0.5) / n_};
}

Rgb ColorHistogram::bin_mean(std::size_t bin) const
{
    const double w = vote_weight_[bin];
    if (!(w > 0.0))
        return bin_center(bin);
    return (1.0 / w) * color_sum_[bin];
}

void ColorHistogram::add(const Rgb& c, double weight)
{
    if (!(weight >= 0.0))
        throw InvalidArgument("histogram vote weight must be >= 0");
    if (weight == 0.0)
        return;
    const std::size_t bin = bin_of(c);
    mass_[bin] += weight;
    vote_weight_[bin] += weight;
    color_sum_[bin] = color_sum_[bin] + weight * c;
    normalized_ = false;
}

double ColorHistogram::total() const
{
    double t = 0.0;
    for (double m : mass_)
        t += m;
    return t;
}

void ColorHistogram::normalize()
{
    const double t = total();
    if (!(t > 0.0))
        throw EmptyDistribution("histogram has zero total weight");
    for (double& m : mass_)
        m /= t;
    normalized_ = true;
}

std::vector<std::size_t> ColorHistogram::occupied_bins() const
{
    std::vector<std::size_t> bins;
    for (std::size_t b = 0; b < mass_.size(); ++b)
        if (mass_[b] > 0.0)
            bins.push_back(b);
    return bins;
}

ColorHistogram build_histogram(std::span<const WeightedColor> pixels, int bins_per_axis)
{
    ColorHistogram h(bins_per_axis);
    for (const auto& p : pixels)
        h.add(p.color, p.weight);
    h.normalize();
    return h;
}

ColorHistogram build_histogram(const Raster& image, int bins_per_axis)
{
    ColorHistogram h(bins_per_axis);
    for (const auto& p : image.pixels)
        h.add(p, 1.0);
    h.normalize();
    return h;
}

ColorHistogram build_histogram(const Raster& image, std::span<const double> weights, int bins_per_axis)
{
    if (weights.size() != image.size())
        throw InvalidArgument("weight plane does not match image size");
    ColorHistogram h(bins_per_axis);
    for (std::size_t i = 0; i < image.size(); ++i)
        h.add(image.pixels[i], weights[i]);
    h.normalize();
    return h;
}

ColorHistogram sail_histogram(std::span<const Rgb> colors, int bins_per_axis)
{
    if (colors.empty())
        throw EmptyDistribution("sail histogram of an empty color set");
    ColorHistogram h(bins_per_axis);
    const double w = 1.0 / static_cast<double>(colors.size());
    for (const auto& c : colors)
        h.add(c, w);
    h.normalize();
    return h;
}

ColorHistogram sail_histogram(const DecodedSail& decoded, int bins_per_axis)
{
    return sail_histogram(decoded.colors, bins_per_axis);
}

ColorHistogram patchmax_histogram(const Raster& image, int patch_size, int bins_per_axis)
{
    if (image.empty())
        throw InvalidArgument("patchmax_histogram of an empty image");
    if (patch_size < 1)
        throw InvalidArgument("patch size must be >= 1");

    ColorHistogram result(bins_per_axis);
    ColorHistogram patch(bins_per_axis);
    std::vector<double> counts(patch.bin_count());
    std::vector<std::size_t> touched;
    for (int y0 = 0; y0 < image.height; y0 += patch_size) {
        for (int x0 = 0; x0 < image.width; x0 += patch_size) {
            const int y1 = std::min(image.height, y0 + patch_size);
            const int x1 = std::min(image.width, x0 + patch_size);
            const double total = static_cast<double>((y1 - y0) * (x1 - x0));
            touched.clear();
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    const std::size_t bin = patch.bin_of(image.at(x, y));
                    if (counts[bin] == 0.0)
                        touched.push_back(bin);
                    counts[bin] += 1.0;
                }
            }
            for (std::size_t bin : touched) {
                const double m = counts[bin] / total;
                if (m > result.mass(bin))
                    result.set_mass(bin, m);
                counts[bin] = 0.0;
            }
        }
    }
    result.normalize();
    return result;
}

double histogram_entropy(const ColorHistogram& h)
{
    const double total = h.total();
    if (!(total > 0.0))
        throw EmptyDistribution("entropy of an empty histogram");
    double e = 0.0;
    for (double m : h.masses()) {
        if (m > 0.0) {
            const double p = m / total;
            e -= p * std::log2(p);
        }
    }
    return e;
}

Hardness hardness_of(double entropy_bits)
{
    if (entropy_bits < 1.5)
        return Hardness::easy;
    if (entropy_bits > 3.0)
        return Hardness::hard;
    return Hardness::medium;
}

std::string_view to_string(Hardness h)
{
    switch (h) {
    case Hardness::easy: return "easy";
    case Hardness::medium: return "medium";
    case Hardness::hard: return "hard";
    }
    return "unknown";
}

double colorfulness(const Raster& image)
{
    if (image.empty())
        throw InvalidArgument("colorfulness of an empty image");
    const double n = static_cast<double>(image.size());
    double sum_rg = 0.0, sum_yb = 0.0;
    for (const auto& p : image.pixels) {
        const double r = p[0] * 255.0, g = p[1] * 255.0, b = p[2] * 255.0;
        sum_rg += r - g;
        sum_yb += 0.5 * (r + g) - b;
    }
    const double mean_rg = sum_rg / n;
    const double mean_yb = sum_yb / n;
    double var_rg = 0.0, var_yb = 0.0;
    for (const auto& p : image.pixels) {
        const double r = p[0] * 255.0, g = p[1] * 255.0, b = p[2] * 255.0;
        const double drg = (r - g) - mean_rg;
        const double dyb = (0.5 * (r + g) - b) - mean_yb;
        var_rg += drg * drg;
        var_yb += dyb * dyb;
    }
    var_rg /= n;
    var_yb /= n;
    return std::sqrt(var_rg + var_yb) + 0.3 * std::sqrt(mean_rg * mean_rg + mean_yb * mean_yb);
}

} // namespace colorsail
