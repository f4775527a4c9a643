#include "colorsail/cluster.hpp"

#include <limits>

#include "colorsail/error.hpp"
#include "colorsail/kernels.hpp"
#include "colorsail/random.hpp"

namespace colorsail {

namespace {

std::size_t sample_weighted(Rng& rng, std::span<const double> w, double sum)
{
    double r = rng.uniform() * sum;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0)
            continue;
        r -= w[i];
        if (r < 0.0)
            return i;
    }
    for (std::size_t i = w.size(); i-- > 0;)
        if (w[i] > 0.0)
            return i;
    return 0;
}

} // namespace

KMeansResult kmeans(std::span<const WeightedColor> points, int k, std::uint64_t seed, int max_iterations)
{
    if (k < 1)
        throw InvalidArgument("kmeans: k must be >= 1");
    if (points.empty())
        throw EmptyDistribution("kmeans: no points");
    std::vector<double> weights(points.size());
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        weights[i] = points[i].weight;
        total += weights[i];
    }
    if (!(total > 0.0))
        throw EmptyDistribution("kmeans: zero total weight");

    Rng rng(seed);
    KMeansResult out;
    out.centers.push_back(points[sample_weighted(rng, weights, total)].color);

    kernels::ColorPlanes planes(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        planes.set(i, points[i].color);
    std::vector<std::uint32_t> nearest(points.size());
    std::vector<double> d2(points.size());
    std::vector<double> score(points.size());
    while (static_cast<int>(out.centers.size()) < k) {
        kernels::nearest_colors(planes, out.centers, nearest, d2);
        double sum = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            score[i] = d2[i] * weights[i];
            sum += score[i];
        }
        out.centers.push_back(sum > 0.0 ? points[sample_weighted(rng, score, sum)].color : out.centers.front());
    }

    out.labels.assign(points.size(), -1);
    for (int iter = 0; iter < max_iterations; ++iter) {
        kernels::nearest_colors(planes, out.centers, nearest, d2);
        bool changed = false;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const int label = static_cast<int>(nearest[i]);
            if (out.labels[i] != label) {
                out.labels[i] = label;
                changed = true;
            }
        }
        out.iterations = iter + 1;
        if (!changed)
            break;
        std::vector<Rgb> sum(out.centers.size(), Rgb{0.0, 0.0, 0.0});
        std::vector<double> mass(out.centers.size(), 0.0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            sum[out.labels[i]] = sum[out.labels[i]] + weights[i] * points[i].color;
            mass[out.labels[i]] += weights[i];
        }
        for (std::size_t c = 0; c < out.centers.size(); ++c)
            if (mass[c] > 0.0)
                out.centers[c] = (1.0 / mass[c]) * sum[c];
    }
    return out;
}

} // namespace colorsail
