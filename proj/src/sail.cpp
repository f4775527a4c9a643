#include "colorsail/sail.hpp"

#include <cmath>
#include <string>

#include "colorsail/error.hpp"

namespace colorsail {

namespace {

constexpr double kSimplexSlack = 1e-12;

// d u_ijk / d focus_u and d u_ijk / d focus_v, kControlExponents order.
constexpr std::array<std::array<double, 3>, 10> kDbaryDu{{
    {0, 0, 0}, {0, 0, 0}, {0, 0, 0},
    {0, 0, 0}, {1, -1, 0},
    {1, 0, -1}, {1, 0, -1},
    {0, 1, -1}, {0, 0, 0},
    {1, 0, -1},
}};
constexpr std::array<std::array<double, 3>, 10> kDbaryDv{{
    {0, 0, 0}, {0, 0, 0}, {0, 0, 0},
    {-1, 1, 0}, {0, 0, 0},
    {1, 0, -1}, {0, 0, 0},
    {0, 1, -1}, {0, 1, -1},
    {0, 1, -1},
}};

constexpr std::array<double, 4> kFactorial{1.0, 1.0, 2.0, 6.0};

double ipow(double x, int e)
{
    double r = 1.0;
    for (int k = 0; k < e; ++k)
        r *= x;
    return r;
}

double bary_distance_squared(const std::array<double, 3>& a, const std::array<double, 3>& b)
{
    const double d0 = a[0] - b[0];
    const double d1 = a[1] - b[1];
    const double d2 = a[2] - b[2];
    return d0 * d0 + d1 * d1 + d2 * d2;
}

Rgb blend_vertices(const std::array<Rgb, 3>& v, const std::array<double, 3>& u)
{
    return {u[0] * v[0][0] + u[1] * v[1][0] + u[2] * v[2][0],
            u[0] * v[0][1] + u[1] * v[1][1] + u[2] * v[2][1],
            u[0] * v[0][2] + u[1] * v[1][2] + u[2] * v[2][2]};
}

// Per-sail quantities shared by every grid point.
struct WindTerms {
    std::array<std::array<double, 3>, 10> bary;
    std::array<double, 10> falloff;       // f(d2), zero at corners
    std::array<double, 10> dfalloff_du;   // d f(d2) / d focus_u
    std::array<double, 10> dfalloff_dv;
    Rgb normal;
};

WindTerms wind_terms(const ColorSail& sail, const WindFalloff& falloff)
{
    WindTerms t{};
    t.bary = control_barycentrics(sail.focus_u, sail.focus_v);
    t.normal = sail_normal(sail);
    const auto& focus = t.bary[kFocusControl];
    for (std::size_t c = 0; c < 10; ++c) {
        if (is_corner_control(c))
            continue;
        const double d2 = bary_distance_squared(t.bary[c], focus);
        const double f = falloff(d2);
        const double df_dd2 = -f / falloff.alpha;
        double dd2_du = 0.0;
        double dd2_dv = 0.0;
        for (int m = 0; m < 3; ++m) {
            const double diff = t.bary[c][m] - focus[m];
            dd2_du += 2.0 * diff * (kDbaryDu[c][m] - kDbaryDu[kFocusControl][m]);
            dd2_dv += 2.0 * diff * (kDbaryDv[c][m] - kDbaryDv[kFocusControl][m]);
        }
        t.falloff[c] = f;
        t.dfalloff_du[c] = df_dd2 * dd2_du;
        t.dfalloff_dv[c] = df_dd2 * dd2_dv;
    }
    return t;
}

} // namespace

void ColorSail::validate() const
{
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t ch = 0; ch < 3; ++ch) {
            const double c = vertices[k][ch];
            if (!(c >= 0.0 && c <= 1.0))
                throw InvalidArgument("vertex" + std::to_string(k) + " channel out of [0,1]");
        }
    }
    if (!(focus_u >= 0.0 && focus_v >= 0.0 && focus_u + focus_v <= 1.0 + kSimplexSlack))
        throw InvalidArgument("focus outside the barycentric simplex");
    if (!(wind >= -1.0 && wind <= 1.0))
        throw InvalidArgument("wind out of [-1,1]");
    if (subdivision < 2)
        throw InvalidSubdivision("subdivision must be >= 2");
    // Index maps are 16-bit with 65535 reserved, so s*s must stay below it.
    if (subdivision > 255)
        throw InvalidSubdivision("subdivision must be <= 255");
}

std::vector<GridPoint> enumerate_grid(int s, bool include_downward)
{
    if (s < 2)
        throw InvalidSubdivision("subdivision must be >= 2, got " + std::to_string(s));
    const double step = 1.0 / static_cast<double>(s - 1);
    auto upright_bary = [&](int i, int j) {
        return std::array<double, 3>{i * step, j * step, (s - 1 - i - j) * step};
    };

    std::vector<GridPoint> grid;
    grid.reserve(include_downward ? expanded_count(s) : upright_count(s));
    for (int i = 0; i < s; ++i)
        for (int j = 0; i + j <= s - 1; ++j)
            grid.push_back({i, j, upright_bary(i, j), GridKind::upright});

    if (include_downward) {
        for (int i = 0; i < s - 1; ++i) {
            for (int j = 0; i + j <= s - 2; ++j) {
                const auto a = upright_bary(i, j);
                const auto b = upright_bary(i + 1, j);
                const auto c = upright_bary(i, j + 1);
                std::array<double, 3> mean{};
                for (int m = 0; m < 3; ++m)
                    mean[m] = (a[m] + b[m] + c[m]) / 3.0;
                grid.push_back({i, j, mean, GridKind::downward});
            }
        }
    }
    return grid;
}

std::array<double, 10> bernstein_basis(double u0, double u1)
{
    const double u2 = 1.0 - u0 - u1;
    if (!(u0 >= -kSimplexSlack && u1 >= -kSimplexSlack && u2 >= -kSimplexSlack))
        throw DomainError("bernstein_basis: point outside the simplex");
    std::array<double, 10> b{};
    for (std::size_t c = 0; c < 10; ++c) {
        const auto [i, j, k] = kControlExponents[c];
        const double coeff = 6.0 / (kFactorial[i] * kFactorial[j] * kFactorial[k]);
        b[c] = coeff * ipow(u0, i) * ipow(u1, j) * ipow(u2, k);
    }
    return b;
}

double WindFalloff::operator()(double d2) const { return beta * std::exp(-d2 / alpha); }

std::array<std::array<double, 3>, 10> control_barycentrics(double pu, double pv)
{
    return {{
        {1.0, 0.0, 0.0},
        {0.0, 1.0, 0.0},
        {0.0, 0.0, 1.0},
        {1.0 - pv, pv, 0.0},          // 210
        {pu, 1.0 - pu, 0.0},          // 120
        {pu + pv, 0.0, 1.0 - pu - pv}, // 201
        {pu, 0.0, 1.0 - pu},          // 102
        {0.0, pu + pv, 1.0 - pu - pv}, // 021
        {0.0, pv, 1.0 - pv},          // 012
        {pu, pv, 1.0 - pu - pv},      // 111
    }};
}

Rgb sail_normal(const ColorSail& sail)
{
    const auto& v = sail.vertices;
    return cross(v[1] - v[0], v[2] - v[0]);
}

ControlNet control_points(const ColorSail& sail, const WindFalloff& falloff)
{
    const WindTerms t = wind_terms(sail, falloff);
    ControlNet net;
    for (std::size_t c = 0; c < 10; ++c) {
        net.points[c] = blend_vertices(sail.vertices, t.bary[c]);
        if (!is_corner_control(c))
            net.points[c] = net.points[c] + (t.falloff[c] * sail.wind) * t.normal;
    }
    return net;
}

SailParams pack_params(const ColorSail& sail)
{
    SailParams p{};
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t ch = 0; ch < 3; ++ch)
            p[3 * k + ch] = sail.vertices[k][ch];
    p[kParamFocusU] = sail.focus_u;
    p[kParamFocusV] = sail.focus_v;
    p[kParamWind] = sail.wind;
    return p;
}

ColorSail unpack_params(const SailParams& p, int subdivision)
{
    ColorSail sail;
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t ch = 0; ch < 3; ++ch)
            sail.vertices[k][ch] = p[3 * k + ch];
    sail.focus_u = p[kParamFocusU];
    sail.focus_v = p[kParamFocusV];
    sail.wind = p[kParamWind];
    sail.subdivision = subdivision;
    return sail;
}

SailDecoder::SailDecoder(int subdivision, bool include_downward, WindFalloff falloff)
    : subdivision_(subdivision), falloff_(falloff), grid_(enumerate_grid(subdivision, include_downward))
{
    weights_.reserve(grid_.size());
    for (const auto& g : grid_)
        weights_.push_back(bernstein_basis(g.bary[0], g.bary[1]));
}

void SailDecoder::colors(const ColorSail& sail, std::span<Rgb> out) const
{
    const ControlNet net = control_points(sail, falloff_);
    for (std::size_t g = 0; g < grid_.size(); ++g) {
        Rgb c{0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < 10; ++k)
            c = c + weights_[g][k] * net.points[k];
        out[g] = c;
    }
}

void SailDecoder::colors_and_jacobians(const ColorSail& sail, std::span<Rgb> out, std::span<ColorJacobian> jac) const
{
    colors(sail, out);
    const WindTerms t = wind_terms(sail, falloff_);
    const auto& v = sail.vertices;
    const double w = sail.wind;

    // d n / d v_m = [v_{m+2} - v_{m+1}]_x (cyclic), applied as a 3x3 matrix.
    std::array<std::array<std::array<double, 3>, 3>, 3> dnormal{};
    for (std::size_t m = 0; m < 3; ++m) {
        const Rgb x = v[(m + 2) % 3] - v[(m + 1) % 3];
        dnormal[m] = {{{0.0, -x[2], x[1]}, {x[2], 0.0, -x[0]}, {-x[1], x[0], 0.0}}};
    }

    for (std::size_t g = 0; g < grid_.size(); ++g) {
        const auto& b = weights_[g];
        std::array<double, 3> planar{};
        std::array<double, 3> planar_du{};
        std::array<double, 3> planar_dv{};
        double wind_weight = 0.0;
        double wind_du = 0.0;
        double wind_dv = 0.0;
        for (std::size_t c = 0; c < 10; ++c) {
            for (int m = 0; m < 3; ++m) {
                planar[m] += b[c] * t.bary[c][m];
                planar_du[m] += b[c] * kDbaryDu[c][m];
                planar_dv[m] += b[c] * kDbaryDv[c][m];
            }
            wind_weight += b[c] * t.falloff[c];
            wind_du += b[c] * t.dfalloff_du[c];
            wind_dv += b[c] * t.dfalloff_dv[c];
        }

        ColorJacobian& J = jac[g];
        for (auto& row : J)
            row.fill(0.0);
        for (std::size_t ch = 0; ch < 3; ++ch) {
            for (std::size_t m = 0; m < 3; ++m) {
                J[ch][3 * m + ch] += planar[m];
                for (std::size_t col = 0; col < 3; ++col)
                    J[ch][3 * m + col] += w * wind_weight * dnormal[m][ch][col];
            }
            J[ch][kParamFocusU] = planar_du[0] * v[0][ch] + planar_du[1] * v[1][ch] + planar_du[2] * v[2][ch]
                                  + w * wind_du * t.normal[ch];
            J[ch][kParamFocusV] = planar_dv[0] * v[0][ch] + planar_dv[1] * v[1][ch] + planar_dv[2] * v[2][ch]
                                  + w * wind_dv * t.normal[ch];
            J[ch][kParamWind] = wind_weight * t.normal[ch];
        }
    }
}

DecodedSail decode(const ColorSail& sail, bool include_downward, bool clamp)
{
    sail.validate();
    const SailDecoder decoder(sail.subdivision, include_downward);
    DecodedSail out;
    out.sail = sail;
    out.grid = decoder.grid();
    out.colors.resize(decoder.size());
    decoder.colors(sail, out.colors);
    if (clamp)
        for (auto& c : out.colors)
            c = clamp01(c);
    return out;
}

std::vector<ColorJacobian> decode_jacobian(const ColorSail& sail)
{
    sail.validate();
    const SailDecoder decoder(sail.subdivision, true);
    std::vector<Rgb> colors(decoder.size());
    std::vector<ColorJacobian> jac(decoder.size());
    decoder.colors_and_jacobians(sail, colors, jac);
    return jac;
}

} // namespace colorsail
