#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "colorsail/error.hpp"
#include "colorsail/sail.hpp"
#include "oracles.hpp"

using namespace colorsail;

namespace {

ColorSail identity_sail(int s, double wind = 0.0)
{
    ColorSail sail;
    sail.vertices = {Rgb{1, 0, 0}, Rgb{0, 1, 0}, Rgb{0, 0, 1}};
    sail.wind = wind;
    sail.subdivision = s;
    return sail;
}

double plane_distance(const ColorSail& s, const Rgb& c)
{
    const Rgb n = sail_normal(s);
    const double len = std::sqrt(dot(n, n));
    return std::fabs(dot(c - s.vertices[0], n)) / len;
}

} // namespace

TEST_CASE("grid sizes follow the counting law")
{
    for (int s = 2; s <= 32; ++s) {
        CHECK(enumerate_grid(s, false).size() == static_cast<std::size_t>(s * (s + 1) / 2));
        CHECK(enumerate_grid(s, true).size() == static_cast<std::size_t>(s * s));
    }
    CHECK(enumerate_grid(10, false).size() == 55);
    CHECK(enumerate_grid(10, true).size() == 100);
    CHECK(enumerate_grid(2, true).size() == 4);
}

TEST_CASE("s=3 upright grid holds the six lattice points in (i, j) order")
{
    const auto g = enumerate_grid(3, false);
    REQUIRE(g.size() == 6);
    const std::vector<std::array<double, 3>> expected{
        {0, 0, 1}, {0, 0.5, 0.5}, {0, 1, 0}, {0.5, 0, 0.5}, {0.5, 0.5, 0}, {1, 0, 0}};
    for (std::size_t k = 0; k < 6; ++k)
        for (int m = 0; m < 3; ++m)
            CHECK(g[k].bary[m] == doctest::Approx(expected[k][m]).epsilon(1e-15));

    // Same set as the hand enumeration.
    std::vector<std::array<double, 3>> hand{
        {1, 0, 0}, {0.5, 0.5, 0}, {0, 1, 0}, {0.5, 0, 0.5}, {0, 0.5, 0.5}, {0, 0, 1}};
    for (const auto& h : hand) {
        const bool found = std::any_of(g.begin(), g.end(), [&](const GridPoint& p) {
            return std::fabs(p.bary[0] - h[0]) < 1e-15 && std::fabs(p.bary[1] - h[1]) < 1e-15;
        });
        CHECK(found);
    }
}

TEST_CASE("grid points sum to one and carry their kind")
{
    for (int s : {2, 3, 7, 16}) {
        const auto g = enumerate_grid(s, true);
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(std::fabs(g[k].bary[0] + g[k].bary[1] + g[k].bary[2] - 1.0) < 1e-12);
            CHECK((g[k].kind == GridKind::upright) == (k < upright_count(s)));
        }
        const auto ref = oracle::grid(s, true);
        for (std::size_t k = 0; k < g.size(); ++k)
            for (int m = 0; m < 3; ++m)
                CHECK(std::fabs(g[k].bary[m] - ref[k][m]) < 1e-14);
    }
}

TEST_CASE("invalid subdivision is rejected")
{
    CHECK_THROWS_AS(enumerate_grid(1, false), InvalidSubdivision);
    CHECK_THROWS_AS(enumerate_grid(0, true), InvalidSubdivision);
    ColorSail s = identity_sail(1);
    CHECK_THROWS_AS(s.validate(), InvalidSubdivision);
}

TEST_CASE("sail validation names the broken field")
{
    ColorSail s = identity_sail(3);
    s.wind = 1.5;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("wind"), InvalidArgument);
    s = identity_sail(3);
    s.focus_u = 0.8;
    s.focus_v = 0.4;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("focus"), InvalidArgument);
    s = identity_sail(3);
    s.vertices[1][2] = -0.1;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("vertex1"), InvalidArgument);
}

TEST_CASE("bernstein basis")
{
    const auto corner = bernstein_basis(1.0, 0.0);
    CHECK(corner[0] == 1.0);
    for (std::size_t k = 1; k < 10; ++k)
        CHECK(corner[k] == 0.0);

    const auto mid = bernstein_basis(1.0 / 3.0, 1.0 / 3.0);
    CHECK(mid[kFocusControl] == doctest::Approx(2.0 / 9.0).epsilon(1e-14));

    Rng rng(7);
    for (int t = 0; t < 1000; ++t) {
        double u = rng.uniform(), v = rng.uniform();
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const auto b = bernstein_basis(u, v);
        double sum = 0.0;
        for (double x : b)
            sum += x;
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(bernstein_basis(0.8, 0.3), DomainError);
    CHECK_THROWS_AS(bernstein_basis(-0.1, 0.3), DomainError);
}

TEST_CASE("control points: identity basis with full wind")
{
    ColorSail s = identity_sail(3, 1.0);
    const Rgb n = sail_normal(s);
    CHECK(n == Rgb{1, 1, 1});
    const auto net = control_points(s);
    for (int ch = 0; ch < 3; ++ch)
        CHECK(net.points[kFocusControl][ch] == doctest::Approx(1.0 / 3.0 + 0.25).epsilon(1e-14));
    CHECK(net.points[0] == s.vertices[0]);
    CHECK(net.points[1] == s.vertices[1]);
    CHECK(net.points[2] == s.vertices[2]);

    const auto ref = oracle::control_net(s);
    const std::array<std::array<int, 3>, 10>& e = kControlExponents;
    for (std::size_t c = 0; c < 10; ++c)
        for (int ch = 0; ch < 3; ++ch)
            CHECK(net.points[c][ch] == doctest::Approx(ref[e[c][0]][e[c][1]][ch]).epsilon(1e-14));
}

TEST_CASE("zero wind control net is planar")
{
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        ColorSail s = oracle::random_sail(rng, 4);
        s.wind = 0.0;
        const auto net = control_points(s);
        const auto bary = control_barycentrics(s.focus_u, s.focus_v);
        for (std::size_t c = 0; c < 10; ++c)
            for (int ch = 0; ch < 3; ++ch) {
                const double planar =
                    bary[c][0] * s.vertices[0][ch] + bary[c][1] * s.vertices[1][ch] + bary[c][2] * s.vertices[2][ch];
                CHECK(std::fabs(net.points[c][ch] - planar) < 1e-15);
            }
    }
}

TEST_CASE("decode: identity basis downward centroid")
{
    const auto d = decode(identity_sail(3), true, false);
    REQUIRE(d.size() == 9);
    const Rgb c = d.colors[upright_count(3)];
    CHECK(c[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(c[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(c[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("decode matches de Casteljau evaluation")
{
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        const ColorSail s = oracle::random_sail(rng, 2 + t % 9);
        const auto d = decode(s, true, false);
        const auto ref = oracle::decode(s, true);
        REQUIRE(d.size() == ref.size());
        for (std::size_t k = 0; k < ref.size(); ++k)
            for (int ch = 0; ch < 3; ++ch)
                CHECK(std::fabs(d.colors[k][ch] - ref[k][ch]) < 1e-13);
    }
}

TEST_CASE("decode invariants: corners, planarity, antisymmetry, clamp")
{
    Rng rng(5);
    for (int t = 0; t < 300; ++t) {
        ColorSail s = oracle::random_sail(rng, 2 + t % 12);
        const auto d = decode(s, true, false);
        for (const std::size_t corner : {std::size_t{0}, upright_count(s.subdivision) - 1})
            CHECK(d.grid[corner].bary[0] + d.grid[corner].bary[1] + d.grid[corner].bary[2] == 1.0);
        // Corner grid points: (0,0,1) -> v2, (0,s-1,0) -> v1, (s-1,0,0) -> v0.
        const std::size_t n = static_cast<std::size_t>(s.subdivision);
        const std::array<std::pair<std::size_t, int>, 3> corners{
            {{0, 2}, {n - 1, 1}, {upright_count(s.subdivision) - 1, 0}}};
        for (auto [idx, vert] : corners)
            for (int ch = 0; ch < 3; ++ch)
                CHECK(std::fabs(d.colors[idx][ch] - s.vertices[vert][ch]) <= 1e-12);

        ColorSail flat = s;
        flat.wind = 0.0;
        for (const auto& c : decode(flat).colors)
            CHECK(plane_distance(flat, c) < 1e-9);

        ColorSail neg = s;
        neg.wind = -s.wind;
        const auto dn = decode(neg);
        const auto d0 = decode(flat);
        for (std::size_t k = 0; k < d.size(); ++k)
            for (int ch = 0; ch < 3; ++ch)
                CHECK(std::fabs((d.colors[k][ch] - d0.colors[k][ch]) + (dn.colors[k][ch] - d0.colors[k][ch])) < 1e-9);

        for (const auto& c : decode(s, true, true).colors)
            for (double x : c)
                CHECK((x >= 0.0 && x <= 1.0));
    }
}

TEST_CASE("decode is bit-deterministic")
{
    Rng rng(9);
    const ColorSail s = oracle::random_sail(rng, 6);
    CHECK(decode(s).colors == decode(s).colors);
}

TEST_CASE("degenerate sails decode with zero wind displacement")
{
    ColorSail s;
    s.vertices = {Rgb{0.2, 0.2, 0.2}, Rgb{0.4, 0.4, 0.4}, Rgb{0.6, 0.6, 0.6}};
    s.wind = 1.0;
    s.subdivision = 4;
    CHECK(sail_normal(s) == Rgb{0, 0, 0});
    ColorSail flat = s;
    flat.wind = 0.0;
    CHECK(decode(s).colors == decode(flat).colors);
    for (const auto& J : decode_jacobian(s))
        for (const auto& row : J)
            for (double x : row)
                CHECK(std::isfinite(x));
}

TEST_CASE("zero-wind vertex derivative is the blend weight times identity")
{
    Rng rng(13);
    ColorSail s = oracle::random_sail(rng, 5);
    s.wind = 0.0;
    const auto jac = decode_jacobian(s);
    const auto d = decode(s);
    for (std::size_t g = 0; g < d.size(); ++g) {
        const auto b = bernstein_basis(d.grid[g].bary[0], d.grid[g].bary[1]);
        const auto bary = control_barycentrics(s.focus_u, s.focus_v);
        double w0 = 0.0;
        for (std::size_t c = 0; c < 10; ++c)
            w0 += b[c] * bary[c][0];
        for (int ch = 0; ch < 3; ++ch)
            for (int col = 0; col < 3; ++col)
                CHECK(jac[g][ch][col] == doctest::Approx(ch == col ? w0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("analytic Jacobian matches central differences")
{
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
        ColorSail s = oracle::random_sail(rng, 2 + t % 7);
        const SailDecoder dec(s.subdivision, true);
        std::vector<Rgb> colors(dec.size());
        std::vector<ColorJacobian> jac(dec.size());
        dec.colors_and_jacobians(s, colors, jac);
        const SailParams p = pack_params(s);
        for (std::size_t g = 0; g < dec.size(); ++g)
            for (int ch = 0; ch < 3; ++ch) {
                auto f = [&](const SailParams& q) {
                    std::vector<Rgb> c(dec.size());
                    dec.colors(unpack_params(q, s.subdivision), c);
                    return c[g][ch];
                };
                const auto fd = oracle::central_diff(f, p, 1e-5);
                for (std::size_t k = 0; k < kSailParams; ++k) {
                    const double rel = std::fabs(jac[g][ch][k] - fd[k]) / std::max(std::fabs(fd[k]), 1e-8);
                    CHECK((rel < 1e-4 || std::fabs(jac[g][ch][k] - fd[k]) < 1e-9));
                }
            }
    }
}

TEST_CASE("pack and unpack are inverse")
{
    Rng rng(19);
    const ColorSail s = oracle::random_sail(rng, 7);
    CHECK(unpack_params(pack_params(s), 7) == s);
}
