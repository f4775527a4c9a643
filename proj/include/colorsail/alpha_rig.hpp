#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "colorsail/fit.hpp"
#include "colorsail/optimizer.hpp"
#include "colorsail/raster.hpp"
#include "colorsail/sail.hpp"

namespace colorsail {

inline constexpr double kDefaultTemperature = 1.0 / 3.0;
inline constexpr double kDefaultTvWeight = 1e-3;
inline constexpr double kDefaultAlphaPenalty = 100.0;

/// softmax(z / tau) with max subtraction.
void tempered_softmax(std::span<const double> z, double tau, std::span<double> out);
std::vector<double> tempered_softmax(std::span<const double> z, double tau);

/// Per-pixel logits for N masks, pixel-major (logits[p * n + i]).
struct AlphaField {
    int width = 0;
    int height = 0;
    int n_alpha = 0;
    double tau = kDefaultTemperature;
    std::vector<double> logits;

    AlphaField() = default;
    AlphaField(int w, int h, int n, double temperature = kDefaultTemperature);

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    /// Pixel-major alphas; each pixel sums to 1.
    std::vector<double> alphas() const;
};

/// Soft masks as one plane per mask.
std::vector<Plane> split_planes(std::span<const double> alphas, int width, int height, int n_alpha);
std::vector<double> interleave_planes(std::span<const Plane> planes);

/// Y_R(p) = sum_i A_i(p) * (color of sail i nearest to Y(p)); sails decoded clamped, expanded set.
Raster reconstruct(const Raster& image, std::span<const double> alphas, std::span<const ColorSail> sails);
Raster reconstruct(const Raster& image, const AlphaField& field, std::span<const ColorSail> sails);

/// Anisotropic total variation: mean over pixels and masks of forward differences
/// in x and y; the last column/row contributes zero.
double tv_penalty(std::span<const double> alphas, int width, int height, int n_alpha);
double tv_penalty(const AlphaField& field);

/// Units of L in the mask-count selection score.
enum class SelectionUnits {
    mean_distance_255,   // mean per-pixel RGB distance on the 0-255 scale
    mse_255,             // mean squared RGB distance on the 0-255 scale
};

struct RigConfig {
    double tau = kDefaultTemperature;
    double tv_weight = kDefaultTvWeight;
    AdamSettings logit_adam{0.05, 0.9, 0.999, 1e-8};
    int epochs = 20;
    int steps_per_epoch = 50;        // logit steps between sail refits
    int refit_iterations = 200;      // warm-started sail iterations per refit
    double init_logit = 2.0;         // logit bonus of the k-means winner
    int max_side = 256;
    FitConfig sail_fit{};            // initial per-mask fits (subdivision, restarts, ...)
    std::vector<int> candidates{2, 3, 4, 5};
    double alpha_penalty = kDefaultAlphaPenalty;
    SelectionUnits selection_units = SelectionUnits::mse_255;
    bool parallel = true;            // fit N_alpha candidates concurrently
    std::uint64_t seed = kDefaultSeed;

    void validate() const;
};

struct RigLoss {
    double recon = 0.0;   // mean per-pixel Euclidean RGB distance, [0,1] scale
    double tv = 0.0;
    double total = 0.0;   // recon + tv_weight * tv
    double mse = 0.0;     // mean squared per-pixel distance, reported only
};

struct RigFit {
    int width = 0;                      // resolution the masks were fitted at
    int height = 0;
    std::vector<double> alphas;         // pixel-major, width*height*n
    std::optional<AlphaField> field;    // absent when masks were user supplied
    std::vector<ColorSail> sails;
    Raster reconstruction;
    RigLoss loss;
    std::vector<double> epoch_objective; // accepted objective at the end of each epoch (first entry: init)

    int n_alpha() const { return static_cast<int>(sails.size()); }
};

RigLoss rig_loss(const Raster& image, std::span<const double> alphas, std::span<const ColorSail> sails,
                 double tv_weight);

/// Joint optimization of per-pixel logits and one sail per mask.
RigFit fit_rig(const Raster& image, int n_alpha, const RigConfig& config);

/// Fits one sail per supplied mask (normalized to sum to 1 per pixel); no logit optimization.
RigFit fit_sails_to_masks(const Raster& image, std::span<const Plane> masks, const RigConfig& config);

/// Reconstruction term in the selection units plus 255 * tv_weight * tv.
double selection_loss(const RigLoss& loss, double tv_weight, SelectionUnits units);

/// argmin of losses[k] + penalty * counts[k], ties toward the smaller count.
std::size_t select_by_score(std::span<const int> counts, std::span<const double> losses, double penalty);

struct AlphaSelection {
    int n_alpha = 0;
    RigFit fit;
    std::vector<RigFit> fits;     // every candidate, in candidate order
    std::vector<int> candidates;
    std::vector<double> losses;   // selection_loss per candidate
    std::vector<double> scores;   // losses + penalty * n
};

AlphaSelection select_n_alpha(const Raster& image, const RigConfig& config);

/// Masks bilinearly resampled to the target size (sums stay 1 up to rounding).
std::vector<Plane> upsample_alphas(const RigFit& fit, int width, int height);

} // namespace colorsail
