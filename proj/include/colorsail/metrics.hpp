#pragma once

#include <span>
#include <vector>

#include "colorsail/color.hpp"
#include "colorsail/colorimetry.hpp"
#include "colorsail/sail.hpp"

namespace colorsail {

inline constexpr double kDefaultLambdaKl = 1e-4;
inline constexpr double kDefaultDeltaE = 10.0;
inline constexpr double kKlEpsilon = 1e-8;

struct FitLoss {
    double e_l2 = 0.0;
    double e_kl = 0.0;
    double r_percent = 0.0;
    double combined = 0.0;
    double lambda = kDefaultLambdaKl;

    double e_percent() const { return 1.0 - r_percent; }
};

/// Weighted mean over targets of the Euclidean RGB distance to the nearest palette color.
double e_l2(std::span<const WeightedColor> targets, std::span<const Rgb> palette);

/// Weighted fraction of targets whose nearest palette color (in CIELAB) is closer than delta.
double r_percent(std::span<const WeightedColor> targets, std::span<const Rgb> palette,
                 double delta = kDefaultDeltaE);

/// KL(sail_hist || image_hist), natural log, image_hist smoothed by epsilon per bin.
double e_kl(const ColorHistogram& sail_hist, const ColorHistogram& image_hist, double epsilon = kKlEpsilon);

/// Decodes the sail (expanded, unclamped) and evaluates every metric.
FitLoss combined_loss(std::span<const WeightedColor> targets, const ColorSail& sail, const ColorHistogram& image_hist,
                      double lambda = kDefaultLambdaKl, double delta = kDefaultDeltaE);

/// Same, on an already decoded color set.
FitLoss evaluate_palette(std::span<const WeightedColor> targets, std::span<const Rgb> palette,
                         const ColorHistogram& image_hist, double lambda = kDefaultLambdaKl,
                         double delta = kDefaultDeltaE);

/// Every pixel as a unit-weight target.
std::vector<WeightedColor> pixel_targets(const Raster& image);

} // namespace colorsail
