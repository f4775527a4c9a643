#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace colorsail {

/// RGB triple, channels nominally in [0,1].
using Rgb = std::array<double, 3>;

/// A color with a non-negative vote weight (alpha, bin mass, pixel count).
struct WeightedColor {
    Rgb color;
    double weight = 1.0;
};

inline Rgb operator+(const Rgb& a, const Rgb& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Rgb operator-(const Rgb& a, const Rgb& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Rgb operator*(double s, const Rgb& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Rgb& a, const Rgb& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Rgb cross(const Rgb& a, const Rgb& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Summation order is fixed so scalar and vector kernels agree bit for bit.
inline double distance_squared(const Rgb& a, const Rgb& b)
{
    const double dr = a[0] - b[0];
    const double dg = a[1] - b[1];
    const double db = a[2] - b[2];
    return (dr * dr + dg * dg) + db * db;
}

inline double distance(const Rgb& a, const Rgb& b) { return std::sqrt(distance_squared(a, b)); }

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline Rgb clamp01(const Rgb& c) { return {clamp01(c[0]), clamp01(c[1]), clamp01(c[2])}; }

/// 8-bit quantization: clamp, then round half away from zero.
inline unsigned char quantize8(double v) { return static_cast<unsigned char>(std::floor(clamp01(v) * 255.0 + 0.5)); }

} // namespace colorsail
