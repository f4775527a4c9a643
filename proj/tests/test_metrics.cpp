#include <doctest.h>

#include <cmath>

#include "colorsail/error.hpp"
#include "colorsail/metrics.hpp"
#include "oracles.hpp"

using namespace colorsail;

TEST_CASE("e_l2 examples")
{
    const std::vector<Rgb> palette{{0.1, 0.2, 0.3}, {0.9, 0.8, 0.7}};
    std::vector<WeightedColor> same;
    for (const auto& c : palette)
        same.push_back({c, 1.0});
    CHECK(e_l2(same, palette) == 0.0);

    const std::vector<WeightedColor> mid{{{0.5, 0.5, 0.5}, 1.0}};
    const std::vector<Rgb> bw{{0, 0, 0}, {1, 1, 1}};
    CHECK(e_l2(mid, bw) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
    CHECK_THROWS_AS(e_l2(mid, std::vector<Rgb>{}), InvalidArgument);

    Rng rng(1);
    std::vector<WeightedColor> targets;
    for (int k = 0; k < 100; ++k)
        targets.push_back({{rng.uniform(), rng.uniform(), rng.uniform()}, rng.uniform()});
    std::vector<Rgb> pal{{0.2, 0.2, 0.2}, {0.7, 0.1, 0.4}};
    const double base = e_l2(targets, pal);
    pal.push_back({0.5, 0.9, 0.5});
    CHECK(e_l2(targets, pal) <= base);
    std::swap(pal[0], pal[2]);
    CHECK(e_l2(targets, pal) == doctest::Approx(e_l2(targets, std::vector<Rgb>{{0.5, 0.9, 0.5}, {0.7, 0.1, 0.4}, {0.2, 0.2, 0.2}})));
}

TEST_CASE("r_percent examples")
{
    const std::vector<WeightedColor> gray{{{100 / 255.0, 100 / 255.0, 100 / 255.0}, 1.0}};
    const std::vector<Rgb> near{{104 / 255.0, 104 / 255.0, 104 / 255.0}};
    CHECK(r_percent(gray, near) == 1.0);

    const std::vector<WeightedColor> red{{{1, 0, 0}, 1.0}};
    const std::vector<Rgb> blue{{0, 0, 1}};
    CHECK(r_percent(red, blue) == 0.0);

    const std::vector<Rgb> both{{0, 0, 1}, {1, 0, 0}};
    CHECK(r_percent(red, both) == 1.0);

    Rng rng(2);
    std::vector<WeightedColor> targets;
    for (int k = 0; k < 200; ++k)
        targets.push_back({{rng.uniform(), rng.uniform(), rng.uniform()}, 1.0});
    const std::vector<Rgb> pal{{0.2, 0.3, 0.4}, {0.8, 0.5, 0.1}};
    CHECK(r_percent(targets, pal, 10.0) <= r_percent(targets, pal, 30.0));
}

TEST_CASE("e_kl examples")
{
    ColorHistogram a(10), b(10);
    a.add({0.05, 0.05, 0.05}, 1.0);
    a.normalize();
    b.add({0.05, 0.05, 0.05}, 0.5);
    b.add({0.95, 0.95, 0.95}, 0.5);
    b.normalize();
    CHECK(e_kl(a, a) == doctest::Approx(0.0).epsilon(1e-4));
    CHECK(e_kl(a, b) == doctest::Approx(std::log(2.0)).epsilon(1e-4));

    ColorHistogram c(10);
    c.add({0.55, 0.05, 0.95}, 1.0);
    c.normalize();
    const double big = e_kl(c, b);
    CHECK(std::isfinite(big));
    CHECK(big == doctest::Approx(std::log(1.0 / 1e-8)).epsilon(1e-3));

    CHECK_THROWS_AS(e_kl(a, ColorHistogram(8)), InvalidArgument);
}

TEST_CASE("combined loss matches recomputation from decoded colors")
{
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const ColorSail s = oracle::random_sail(rng, 3 + t % 5, 0.5);
        std::vector<WeightedColor> targets;
        Raster img(8, 8);
        for (auto& p : img.pixels) {
            p = {rng.uniform(), rng.uniform(), rng.uniform()};
            targets.push_back({p, 1.0});
        }
        const auto ref_hist = patchmax_histogram(img);
        const FitLoss l = combined_loss(targets, s, ref_hist, 1e-4);
        const auto colors = oracle::decode(s);
        double el2 = 0.0;
        for (const auto& tc : targets)
            el2 += std::sqrt(oracle::dist2(tc.color, colors[oracle::nearest(tc.color, colors)]));
        el2 /= targets.size();
        CHECK(l.e_l2 == doctest::Approx(el2).epsilon(1e-10));
        CHECK(l.combined == doctest::Approx(l.e_l2 + 1e-4 * l.e_kl).epsilon(1e-14));
        const FitLoss l0 = combined_loss(targets, s, ref_hist, 0.0);
        CHECK(l0.combined == l0.e_l2);
        CHECK(l.e_kl >= 0.0);
    }
}

TEST_CASE("monochrome target equal to a vertex")
{
    ColorSail s;
    s.vertices = {Rgb{0.9, 0.1, 0.1}, Rgb{0.1, 0.9, 0.1}, Rgb{0.1, 0.1, 0.9}};
    s.subdivision = 3;
    const std::vector<WeightedColor> t{{s.vertices[0], 1.0}};
    ColorHistogram h(10);
    h.add(s.vertices[0], 1.0);
    h.normalize();
    const FitLoss l = combined_loss(t, s, h);
    CHECK(l.e_l2 == 0.0);
    CHECK(l.e_kl > 0.0);
    CHECK(l.r_percent == 1.0);
}
