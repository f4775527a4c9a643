#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "colorsail/color.hpp"
#include "colorsail/raster.hpp"

namespace colorsail {

struct DecodedSail;

/// CIE L*a*b*, D65 white, 2 degree observer.
struct LabColor {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

LabColor srgb_to_lab(const Rgb& rgb);

inline double delta_e76(const LabColor& x, const LabColor& y)
{
    const double dl = x.L - y.L;
    const double da = x.a - y.a;
    const double db = x.b - y.b;
    return std::sqrt(dl * dl + da * da + db * db);
}

/// n x n x n RGB histogram. Besides bin masses it keeps the weighted color sum
/// of the votes in each bin, so callers can use bin means instead of bin centers.
class ColorHistogram {
public:
    explicit ColorHistogram(int bins_per_axis = 10);

    int bins_per_axis() const { return n_; }
    std::size_t bin_count() const { return mass_.size(); }

    /// min(floor(c*n), n-1), with negative channels mapped to bin 0.
    static int channel_bin(double c, int n);
    std::size_t bin_of(const Rgb& c) const;
    Rgb bin_center(std::size_t bin) const;
    /// Weighted mean of the votes in a bin, or its center if it has no recorded votes.
    Rgb bin_mean(std::size_t bin) const;

    void add(const Rgb& c, double weight);
    double total() const;
    bool normalized() const { return normalized_; }
    /// Scales masses to sum to 1; throws EmptyDistribution on zero total.
    void normalize();

    std::span<const double> masses() const { return mass_; }
    double mass(std::size_t bin) const { return mass_[bin]; }
    void set_mass(std::size_t bin, double m) { mass_[bin] = m; }
    std::vector<std::size_t> occupied_bins() const;

private:
    int n_;
    std::vector<double> mass_;
    std::vector<Rgb> color_sum_;
    std::vector<double> vote_weight_;
    bool normalized_ = false;
};

/// Soft-vote histogram; throws EmptyDistribution when no weight is positive.
ColorHistogram build_histogram(std::span<const WeightedColor> pixels, int bins_per_axis = 10);
ColorHistogram build_histogram(const Raster& image, int bins_per_axis = 10);
/// Same, with a per-pixel weight plane (alpha mask).
ColorHistogram build_histogram(const Raster& image, std::span<const double> weights, int bins_per_axis = 10);

/// Every decoded color votes 1/|colors|.
ColorHistogram sail_histogram(const DecodedSail& decoded, int bins_per_axis = 10);
ColorHistogram sail_histogram(std::span<const Rgb> colors, int bins_per_axis = 10);

/// Per-bin maximum over normalized patch histograms, renormalized.
ColorHistogram patchmax_histogram(const Raster& image, int patch_size = 8, int bins_per_axis = 10);

/// Shannon entropy in bits over nonzero bins.
double histogram_entropy(const ColorHistogram& h);

enum class Hardness { easy, medium, hard };

/// easy < 1.5 bits, hard > 3 bits, medium otherwise.
Hardness hardness_of(double entropy_bits);
std::string_view to_string(Hardness h);

/// Hasler-Suesstrunk colorfulness on the 0-255 channel scale, population statistics.
double colorfulness(const Raster& image);

} // namespace colorsail
