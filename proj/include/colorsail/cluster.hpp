#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "colorsail/color.hpp"

namespace colorsail {

struct KMeansResult {
    std::vector<Rgb> centers;
    std::vector<int> labels;   // one per point
    int iterations = 0;
};

/// Weighted k-means with k-means++ seeding (D^2 * weight sampling). When fewer
/// than k distinct points exist, the extra centers duplicate the first one.
/// Ties in assignment go to the lowest center index.
KMeansResult kmeans(std::span<const WeightedColor> points, int k, std::uint64_t seed, int max_iterations = 50);

} // namespace colorsail
