#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "colorsail/colorimetry.hpp"
#include "colorsail/kernels.hpp"
#include "colorsail/metrics.hpp"
#include "colorsail/optimizer.hpp"
#include "colorsail/random.hpp"
#include "colorsail/sail.hpp"

namespace colorsail {

/// Which point of an occupied bin stands in for its pixels during fitting.
enum class BinTarget {
    mean,   // weighted mean of the votes that landed in the bin
    center, // geometric bin center
};

struct FitConfig {
    int subdivision = 5;
    std::vector<int> sweep;              // used by sweep_subdivision; empty means {subdivision}
    double lambda_kl = kDefaultLambdaKl;
    AdamSettings adam{};
    int max_iterations = 2000;
    int restarts = 5;
    bool extremal_start = true;          // one extra descent from extremal_sail after the k-means restarts
    double tolerance = 1e-6;             // relative loss change ...
    int tolerance_window = 50;           // ... over this many iterations
    double complexity_weight = 0.0;      // kappa in the subdivision sweep
    BinTarget bin_target = BinTarget::mean;
    std::uint64_t seed = kDefaultSeed;

    void validate() const;
};

struct RestartTrace {
    std::vector<double> loss;   // optimized objective per iteration
    bool aborted = false;       // non-finite loss encountered
    double final_combined = 0.0;
};

struct FitResult {
    ColorSail sail;
    FitLoss loss;               // evaluated on the fit targets and KL reference
    int iterations = 0;
    int restart = 0;
    std::vector<RestartTrace> traces;
};

/// Occupied bins as weighted targets (bin mean or center, weighted by mass).
std::vector<WeightedColor> histogram_targets(const ColorHistogram& hist, BinTarget mode = BinTarget::mean);

/// Weighted k-means (k=3, k-means++ seeding, <= 50 Lloyd steps) vertices,
/// focus (1/3, 1/3), zero wind. Duplicate vertices are jittered by 1/(2n) per channel.
ColorSail init_sail(std::span<const WeightedColor> targets, int bins_per_axis, int subdivision, std::uint64_t seed);
/// Vertices at three spread-out targets: farthest from the weighted mean, farthest
/// from that, and farthest from the line through both. Focus (1/3, 1/3), zero wind.
ColorSail extremal_sail(std::span<const WeightedColor> targets, int bins_per_axis, int subdivision);
ColorSail init_sail(const ColorHistogram& hist, std::uint64_t seed, int subdivision = 5,
                    BinTarget mode = BinTarget::mean);

/// The optimized objective: E_L2 with a frozen nearest assignment plus
/// lambda * KL of a trilinear soft sail histogram against the reference.
/// The soft histogram makes the KL term differentiable; reported metrics use hard bins.
class SailObjective {
public:
    SailObjective(std::span<const WeightedColor> targets, const ColorHistogram& kl_reference, int subdivision,
                  double lambda);

    /// Refreshes the nearest assignment for `params`, then evaluates. `grad` may be null.
    double evaluate(const SailParams& params, SailParams* grad);
    /// Evaluates with the given assignment held fixed (one entry per target).
    double evaluate_with_assignment(const SailParams& params, std::span<const std::uint32_t> assignment,
                                    SailParams* grad) const;

    std::span<const std::uint32_t> assignment() const { return assignment_; }
    std::span<const WeightedColor> targets() const { return targets_; }
    int subdivision() const { return decoder_.subdivision(); }
    double soft_kl(std::span<const Rgb> colors, std::vector<Rgb>* color_grad) const;

private:
    std::vector<WeightedColor> targets_;
    kernels::ColorPlanes target_planes_;
    double total_weight_;
    std::vector<double> reference_;   // smoothed, normalized reference masses
    int bins_;
    double lambda_;
    SailDecoder decoder_;
    std::vector<std::uint32_t> assignment_;
};

/// Euclidean projection of the focus onto the closed simplex.
std::pair<double, double> project_focus(double u, double v);
/// Clamps vertices to [0,1], focus to the simplex, wind to [-1,1].
void project_params(SailParams& params);

/// Runs one projected-Adam descent from `start`.
FitResult refine_sail(const ColorSail& start, std::span<const WeightedColor> targets,
                      const ColorHistogram& kl_reference, const FitConfig& config);

/// Best of config.restarts seeded descents on the targets derived from `hist`.
FitResult fit_sail(const ColorHistogram& hist, const FitConfig& config);
/// Same with a separate KL reference (e.g. a patch-max histogram).
FitResult fit_sail(const ColorHistogram& hist, const ColorHistogram& kl_reference, const FitConfig& config);
FitResult fit_sail(std::span<const WeightedColor> targets, int bins_per_axis, const ColorHistogram& kl_reference,
                   const FitConfig& config);

struct SweepResult {
    std::vector<FitResult> fits;    // one per entry of the sweep set, in order
    std::size_t selected = 0;
    double score(std::size_t k, double complexity_weight) const;
};

/// Fits each s in config.sweep and selects argmin of combined + kappa * s (ties: smaller s).
SweepResult sweep_subdivision(const ColorHistogram& hist, const FitConfig& config);
SweepResult sweep_subdivision(const ColorHistogram& hist, const ColorHistogram& kl_reference, const FitConfig& config);

} // namespace colorsail
