#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "colorsail/raster.hpp"

namespace colorsail::cli {

enum ExitCode : int {
    kOk = 0,
    kInternalError = 1,
    kInputError = 2,
    kNumericalFailure = 3,
};

/// Runs one command line (args[0] is the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "5", "2..10" or "3,5,7".
std::vector<int> parse_int_set(const std::string& text);

inline constexpr int kPatchSide = 32;
inline constexpr int kAnalyzeMaxSide = 512;
inline constexpr int kEntropyBins = 10;   // 1-bit wide, last bin open

struct ImageAnalysis {
    std::string file;
    int width = 0;
    int height = 0;
    double colorfulness = 0.0;
    int patches = 0;
    int easy = 0;
    int medium = 0;
    int hard = 0;
    double mean_entropy = 0.0;
    std::array<int, kEntropyBins> entropy_hist{};
};

/// Patch top-left corners: centers from a Gaussian at the image center with
/// sigma = side / 4 per axis, truncated so the patch fits inside the image.
std::vector<std::pair<int, int>> sample_patches(int width, int height, int count, std::uint64_t seed);

ImageAnalysis analyze_raster(const Raster& image, int patches, std::uint64_t seed);

std::string analysis_csv_header();
std::string analysis_csv_row(const ImageAnalysis& a);

} // namespace colorsail::cli
