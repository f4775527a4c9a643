#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "colorsail/color.hpp"

namespace colorsail {

/// A color sail: three vertex colors, a focus point in barycentric (u, v), a wind
/// strength, and a subdivision level s (s grid points per triangle edge).
struct ColorSail {
    std::array<Rgb, 3> vertices{};
    double focus_u = 1.0 / 3.0;
    double focus_v = 1.0 / 3.0;
    double wind = 0.0;
    int subdivision = 2;

    /// Throws InvalidArgument (InvalidSubdivision for s) when a field is out of range.
    void validate() const;
    bool operator==(const ColorSail&) const = default;
};

enum class GridKind { upright, downward };

/// Lattice point of the subdivided triangle. Upright points sit at
/// (i, j, s-1-i-j)/(s-1); downward points average the upright points
/// (i,j), (i+1,j), (i,j+1).
struct GridPoint {
    int i = 0;
    int j = 0;
    std::array<double, 3> bary{};
    GridKind kind = GridKind::upright;
};

/// Canonical grid order: upright points lexicographic in (i, j) with i outermost,
/// then (optionally) downward points in the same order. Every index map in a rig
/// refers to this order.
std::vector<GridPoint> enumerate_grid(int subdivision, bool include_downward);

inline std::size_t upright_count(int s) { return static_cast<std::size_t>(s) * (s + 1) / 2; }
inline std::size_t expanded_count(int s) { return static_cast<std::size_t>(s) * s; }

/// Exponents (i, j, k) of the 10 cubic control points, in storage order.
/// Corners come first, the focus point p111 last.
inline constexpr std::array<std::array<int, 3>, 10> kControlExponents{{
    {3, 0, 0}, {0, 3, 0}, {0, 0, 3},
    {2, 1, 0}, {1, 2, 0},
    {2, 0, 1}, {1, 0, 2},
    {0, 2, 1}, {0, 1, 2},
    {1, 1, 1},
}};
inline constexpr std::size_t kFocusControl = 9;

inline bool is_corner_control(std::size_t idx) { return idx < 3; }

/// Cubic Bernstein weights B_ijk(u0, u1) in kControlExponents order.
/// Throws DomainError outside the closed simplex (1e-12 slack).
std::array<double, 10> bernstein_basis(double u0, double u1);

/// Falloff of the wind displacement with squared barycentric distance to the focus.
struct WindFalloff {
    double alpha = 0.8;
    double beta = 0.25;

    double operator()(double d2) const;
};

struct ControlNet {
    std::array<Rgb, 10> points{};
};

/// Barycentric coordinates of each control point as a function of the focus.
std::array<std::array<double, 3>, 10> control_barycentrics(double focus_u, double focus_v);

/// Unnormalized triangle normal (v1 - v0) x (v2 - v0).
Rgb sail_normal(const ColorSail& sail);

ControlNet control_points(const ColorSail& sail, const WindFalloff& falloff = {});

/// Decoded color set of a sail with the grid points that produced it.
struct DecodedSail {
    ColorSail sail;
    std::vector<GridPoint> grid;
    std::vector<Rgb> colors;

    std::size_t size() const { return colors.size(); }
};

DecodedSail decode(const ColorSail& sail, bool include_downward = true, bool clamp = false);

/// Number of free continuous parameters: 9 vertex channels, focus u, focus v, wind.
inline constexpr std::size_t kSailParams = 12;
inline constexpr std::size_t kParamFocusU = 9;
inline constexpr std::size_t kParamFocusV = 10;
inline constexpr std::size_t kParamWind = 11;

using SailParams = std::array<double, kSailParams>;

SailParams pack_params(const ColorSail& sail);
ColorSail unpack_params(const SailParams& p, int subdivision);

/// d color / d parameter for one decoded color: row = channel, column = parameter.
using ColorJacobian = std::array<std::array<double, kSailParams>, 3>;

/// Precomputed Bernstein weights for one subdivision level; decodes a sail and
/// its parameter Jacobian without re-evaluating the polynomial basis.
class SailDecoder {
public:
    SailDecoder(int subdivision, bool include_downward, WindFalloff falloff = {});

    int subdivision() const { return subdivision_; }
    const std::vector<GridPoint>& grid() const { return grid_; }
    std::size_t size() const { return grid_.size(); }

    /// Writes size() colors, unclamped.
    void colors(const ColorSail& sail, std::span<Rgb> out) const;

    /// Colors plus the 3x12 Jacobian of each color.
    void colors_and_jacobians(const ColorSail& sail, std::span<Rgb> out, std::span<ColorJacobian> jac) const;

private:
    int subdivision_;
    WindFalloff falloff_;
    std::vector<GridPoint> grid_;
    std::vector<std::array<double, 10>> weights_;
};

/// Analytic Jacobian of every decoded color (expanded set, unclamped).
std::vector<ColorJacobian> decode_jacobian(const ColorSail& sail);

} // namespace colorsail
