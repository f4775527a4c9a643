#include "colorsail/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "colorsail/cluster.hpp"
#include "colorsail/error.hpp"

namespace colorsail {

void FitConfig::validate() const
{
    if (subdivision < 2)
        throw InvalidSubdivision("subdivision must be >= 2");
    for (int s : sweep)
        if (s < 2)
            throw InvalidSubdivision("sweep entries must be >= 2");
    if (!(lambda_kl >= 0.0))
        throw InvalidArgument("lambda_kl must be >= 0");
    if (!(adam.learning_rate > 0.0) || !(adam.epsilon > 0.0) || !(adam.beta1 > 0.0 && adam.beta1 < 1.0)
        || !(adam.beta2 > 0.0 && adam.beta2 < 1.0))
        throw InvalidArgument("invalid Adam settings");
    if (max_iterations < 1)
        throw InvalidArgument("max_iterations must be >= 1");
    if (restarts < 1)
        throw InvalidArgument("restarts must be >= 1");
    if (!(tolerance > 0.0) || tolerance_window < 1)
        throw InvalidArgument("convergence tolerance must be > 0");
    if (!(complexity_weight >= 0.0))
        throw InvalidArgument("complexity weight must be >= 0");
}

std::vector<WeightedColor> histogram_targets(const ColorHistogram& hist, BinTarget mode)
{
    std::vector<WeightedColor> targets;
    for (std::size_t bin : hist.occupied_bins())
        targets.push_back({mode == BinTarget::mean ? hist.bin_mean(bin) : hist.bin_center(bin), hist.mass(bin)});
    if (targets.empty())
        throw EmptyDistribution("histogram has no occupied bins");
    return targets;
}

// ---------------------------------------------------------------------------
// Initialization

ColorSail init_sail(std::span<const WeightedColor> targets, int bins_per_axis, int subdivision, std::uint64_t seed)
{
    const KMeansResult km = kmeans(targets, 3, seed, 50);
    std::array<Rgb, 3> centers{km.centers[0], km.centers[1], km.centers[2]};

    Rng rng(mix_seed(seed, 0x6a17));
    const double jitter = 1.0 / (2.0 * bins_per_axis);
    for (std::size_t k = 1; k < 3; ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            if (distance_squared(centers[k], centers[j]) < 1e-18) {
                for (auto& ch : centers[k]) {
                    const double step = rng.coin() ? jitter : -jitter;
                    ch = (ch + step >= 0.0 && ch + step <= 1.0) ? ch + step : ch - step;
                }
                break;
            }
        }
    }

    ColorSail sail;
    for (std::size_t k = 0; k < 3; ++k)
        sail.vertices[k] = clamp01(centers[k]);
    sail.focus_u = 1.0 / 3.0;
    sail.focus_v = 1.0 / 3.0;
    sail.wind = 0.0;
    sail.subdivision = subdivision;
    return sail;
}

ColorSail extremal_sail(std::span<const WeightedColor> targets, int bins_per_axis, int subdivision)
{
    if (targets.empty())
        throw EmptyDistribution("extremal_sail: empty support");
    Rgb mean{0.0, 0.0, 0.0};
    double total = 0.0;
    for (const auto& t : targets) {
        for (int c = 0; c < 3; ++c)
            mean[c] += t.weight * t.color[c];
        total += t.weight;
    }
    for (auto& c : mean)
        c /= total;
    auto farthest = [&](auto&& score) {
        std::size_t best = 0;
        double best_v = -1.0;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const double v = score(targets[i].color);
            if (v > best_v) {
                best_v = v;
                best = i;
            }
        }
        return targets[best].color;
    };
    const Rgb a = farthest([&](const Rgb& c) { return distance_squared(c, mean); });
    const Rgb b = farthest([&](const Rgb& c) { return distance_squared(c, a); });
    const Rgb ab{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const double ab2 = ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2];
    const Rgb c = farthest([&](const Rgb& q) {
        const Rgb aq{q[0] - a[0], q[1] - a[1], q[2] - a[2]};
        const double t = ab2 > 0.0 ? (aq[0] * ab[0] + aq[1] * ab[1] + aq[2] * ab[2]) / ab2 : 0.0;
        const Rgb off{aq[0] - t * ab[0], aq[1] - t * ab[1], aq[2] - t * ab[2]};
        return off[0] * off[0] + off[1] * off[1] + off[2] * off[2];
    });

    ColorSail sail;
    sail.vertices = {a, b, c};
    const double jitter = 1.0 / (2.0 * bins_per_axis);
    for (std::size_t k = 1; k < 3; ++k)
        for (std::size_t j = 0; j < k; ++j)
            if (distance_squared(sail.vertices[k], sail.vertices[j]) < 1e-18)
                for (auto& ch : sail.vertices[k])
                    ch = ch + k * jitter <= 1.0 ? ch + k * jitter : ch - k * jitter;
    sail.focus_u = 1.0 / 3.0;
    sail.focus_v = 1.0 / 3.0;
    sail.wind = 0.0;
    sail.subdivision = subdivision;
    return sail;
}

ColorSail init_sail(const ColorHistogram& hist, std::uint64_t seed, int subdivision, BinTarget mode)
{
    const auto targets = histogram_targets(hist, mode);
    return init_sail(targets, hist.bins_per_axis(), subdivision, seed);
}

// ---------------------------------------------------------------------------
// Objective

SailObjective::SailObjective(std::span<const WeightedColor> targets, const ColorHistogram& kl_reference,
                             int subdivision, double lambda)
    : targets_(targets.begin(), targets.end()),
      total_weight_(0.0),
      bins_(kl_reference.bins_per_axis()),
      lambda_(lambda),
      decoder_(subdivision, true)
{
    if (targets_.empty())
        throw EmptyDistribution("objective needs targets");
    target_planes_ = kernels::ColorPlanes(targets_.size());
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        target_planes_.set(i, targets_[i].color);
        total_weight_ += targets_[i].weight;
    }
    if (!(total_weight_ > 0.0))
        throw EmptyDistribution("objective targets have zero weight");

    const double ref_total = kl_reference.total();
    if (!(ref_total > 0.0))
        throw EmptyDistribution("empty KL reference histogram");
    const double smoothed_total = 1.0 + kKlEpsilon * static_cast<double>(kl_reference.bin_count());
    reference_.resize(kl_reference.bin_count());
    for (std::size_t b = 0; b < reference_.size(); ++b)
        reference_[b] = (kl_reference.mass(b) / ref_total + kKlEpsilon) / smoothed_total;
    assignment_.assign(targets_.size(), 0);
}

namespace {

struct AxisWeights {
    int lo = 0;
    int hi = 0;
    double w_lo = 1.0;
    double w_hi = 0.0;
    double dw = 0.0; // d w_hi / d channel (= -d w_lo / d channel)
};

// Linear tent weights onto the two nearest bin centers along one axis.
AxisWeights axis_weights(double c, int n)
{
    AxisWeights a;
    if (n == 1)
        return a;
    const double x = c * n - 0.5;
    if (!(x > 0.0)) {
        a.lo = 0;
        a.hi = 1;
        return a;
    }
    if (x >= n - 1) {
        a.lo = n - 2;
        a.hi = n - 1;
        a.w_lo = 0.0;
        a.w_hi = 1.0;
        return a;
    }
    a.lo = std::min(static_cast<int>(std::floor(x)), n - 2);
    a.hi = a.lo + 1;
    a.w_hi = x - a.lo;
    a.w_lo = 1.0 - a.w_hi;
    a.dw = n;
    return a;
}

} // namespace

double SailObjective::soft_kl(std::span<const Rgb> colors, std::vector<Rgb>* color_grad) const
{
    const int n = bins_;
    const double share = 1.0 / static_cast<double>(colors.size());
    std::vector<double> hist(reference_.size(), 0.0);
    std::vector<std::array<AxisWeights, 3>> axes(colors.size());
    auto bin_index = [n](int r, int g, int b) { return (static_cast<std::size_t>(r) * n + g) * n + b; };

    for (std::size_t c = 0; c < colors.size(); ++c) {
        for (int ch = 0; ch < 3; ++ch)
            axes[c][ch] = axis_weights(colors[c][ch], n);
        const auto& [ar, ag, ab] = axes[c];
        for (int cr = 0; cr < 2; ++cr)
            for (int cg = 0; cg < 2; ++cg)
                for (int cb = 0; cb < 2; ++cb) {
                    const double w = (cr ? ar.w_hi : ar.w_lo) * (cg ? ag.w_hi : ag.w_lo) * (cb ? ab.w_hi : ab.w_lo);
                    if (w > 0.0)
                        hist[bin_index(cr ? ar.hi : ar.lo, cg ? ag.hi : ag.lo, cb ? ab.hi : ab.lo)] += w * share;
                }
    }

    double kl = 0.0;
    std::vector<double> dkl_dh(hist.size(), 0.0);
    for (std::size_t b = 0; b < hist.size(); ++b) {
        if (hist[b] > 0.0) {
            const double ratio = std::log(hist[b] / reference_[b]);
            kl += hist[b] * ratio;
            dkl_dh[b] = ratio + 1.0;
        }
    }

    if (color_grad) {
        color_grad->assign(colors.size(), Rgb{0.0, 0.0, 0.0});
        for (std::size_t c = 0; c < colors.size(); ++c) {
            const auto& ax = axes[c];
            for (int cr = 0; cr < 2; ++cr)
                for (int cg = 0; cg < 2; ++cg)
                    for (int cb = 0; cb < 2; ++cb) {
                        const std::array<int, 3> corner{cr, cg, cb};
                        const std::size_t b = bin_index(cr ? ax[0].hi : ax[0].lo, cg ? ax[1].hi : ax[1].lo,
                                                        cb ? ax[2].hi : ax[2].lo);
                        if (dkl_dh[b] == 0.0)
                            continue;
                        std::array<double, 3> w{};
                        std::array<double, 3> dw{};
                        for (int ch = 0; ch < 3; ++ch) {
                            w[ch] = corner[ch] ? ax[ch].w_hi : ax[ch].w_lo;
                            dw[ch] = corner[ch] ? ax[ch].dw : -ax[ch].dw;
                        }
                        const double scale = share * dkl_dh[b];
                        (*color_grad)[c][0] += scale * dw[0] * w[1] * w[2];
                        (*color_grad)[c][1] += scale * w[0] * dw[1] * w[2];
                        (*color_grad)[c][2] += scale * w[0] * w[1] * dw[2];
                    }
        }
    }
    return kl;
}

double SailObjective::evaluate(const SailParams& params, SailParams* grad)
{
    const ColorSail sail = unpack_params(params, decoder_.subdivision());
    std::vector<Rgb> colors(decoder_.size());
    decoder_.colors(sail, colors);
    std::vector<double> dist2(targets_.size());
    kernels::nearest_colors(target_planes_, colors, assignment_, dist2);
    return evaluate_with_assignment(params, assignment_, grad);
}

double SailObjective::evaluate_with_assignment(const SailParams& params, std::span<const std::uint32_t> assignment,
                                               SailParams* grad) const
{
    const ColorSail sail = unpack_params(params, decoder_.subdivision());
    const std::size_t m = decoder_.size();
    std::vector<Rgb> colors(m);
    std::vector<ColorJacobian> jac;
    if (grad) {
        jac.resize(m);
        decoder_.colors_and_jacobians(sail, colors, jac);
    } else {
        decoder_.colors(sail, colors);
    }

    std::vector<Rgb> color_grad(m, Rgb{0.0, 0.0, 0.0});
    double l2 = 0.0;
    for (std::size_t t = 0; t < targets_.size(); ++t) {
        const Rgb& c = colors[assignment[t]];
        const Rgb diff = c - targets_[t].color;
        const double d = std::sqrt(dot(diff, diff));
        const double w = targets_[t].weight / total_weight_;
        l2 += w * d;
        if (grad && d > 0.0)
            color_grad[assignment[t]] = color_grad[assignment[t]] + (w / d) * diff;
    }

    double value = l2;
    if (lambda_ > 0.0) {
        std::vector<Rgb> kl_grad;
        const double kl = soft_kl(colors, grad ? &kl_grad : nullptr);
        value += lambda_ * kl;
        if (grad)
            for (std::size_t c = 0; c < m; ++c)
                color_grad[c] = color_grad[c] + lambda_ * kl_grad[c];
    }

    if (grad) {
        grad->fill(0.0);
        for (std::size_t c = 0; c < m; ++c) {
            for (std::size_t ch = 0; ch < 3; ++ch) {
                const double g = color_grad[c][ch];
                if (g == 0.0)
                    continue;
                for (std::size_t p = 0; p < kSailParams; ++p)
                    (*grad)[p] += g * jac[c][ch][p];
            }
        }
    }
    return value;
}

// ---------------------------------------------------------------------------
// Projected descent

std::pair<double, double> project_focus(double u, double v)
{
    if (u >= 0.0 && v >= 0.0 && u + v <= 1.0)
        return {u, v};
    auto on_segment = [&](double ax, double ay, double bx, double by) {
        const double dx = bx - ax, dy = by - ay;
        double t = ((u - ax) * dx + (v - ay) * dy) / (dx * dx + dy * dy);
        t = std::clamp(t, 0.0, 1.0);
        return std::pair<double, double>{ax + t * dx, ay + t * dy};
    };
    const std::array<std::pair<double, double>, 3> candidates{
        on_segment(0.0, 0.0, 1.0, 0.0), on_segment(0.0, 0.0, 0.0, 1.0), on_segment(1.0, 0.0, 0.0, 1.0)};
    std::pair<double, double> best = candidates[0];
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        const double d = (c.first - u) * (c.first - u) + (c.second - v) * (c.second - v);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    // Guard the sum constraint against rounding on the hypotenuse.
    if (best.first + best.second > 1.0)
        best.second = 1.0 - best.first;
    return best;
}

void project_params(SailParams& p)
{
    for (std::size_t i = 0; i < 9; ++i)
        p[i] = clamp01(p[i]);
    const auto [u, v] = project_focus(p[kParamFocusU], p[kParamFocusV]);
    p[kParamFocusU] = u;
    p[kParamFocusV] = v;
    p[kParamWind] = std::clamp(p[kParamWind], -1.0, 1.0);
}

namespace {

bool all_finite(const SailParams& p)
{
    return std::all_of(p.begin(), p.end(), [](double x) { return std::isfinite(x); });
}

struct Descent {
    SailParams best{};
    bool found = false;
    int iterations = 0;
    RestartTrace trace;
};

Descent descend(const ColorSail& start, SailObjective& objective, const FitConfig& config)
{
    Descent out;
    SailParams params = pack_params(start);
    project_params(params);
    Adam adam(kSailParams, config.adam);
    double best = std::numeric_limits<double>::infinity();
    SailParams grad{};
    for (int it = 0; it < config.max_iterations; ++it) {
        const double value = objective.evaluate(params, &grad);
        if (!std::isfinite(value) || !all_finite(grad)) {
            out.trace.aborted = true;
            break;
        }
        out.trace.loss.push_back(value);
        out.iterations = it + 1;
        if (value < best) {
            best = value;
            out.best = params;
            out.found = true;
        }
        if (it >= config.tolerance_window) {
            const double prev = out.trace.loss[static_cast<std::size_t>(it - config.tolerance_window)];
            if (std::abs(prev - value) <= config.tolerance * std::max(std::abs(prev), 1e-12))
                break;
        }
        adam.step(params, grad);
        project_params(params);
    }
    return out;
}

FitResult finish(const SailParams& params, int subdivision, std::span<const WeightedColor> targets,
                 const ColorHistogram& kl_reference, double lambda)
{
    FitResult r;
    r.sail = unpack_params(params, subdivision);
    r.loss = combined_loss(targets, r.sail, kl_reference, lambda);
    return r;
}

} // namespace

FitResult refine_sail(const ColorSail& start, std::span<const WeightedColor> targets,
                      const ColorHistogram& kl_reference, const FitConfig& config)
{
    config.validate();
    SailObjective objective(targets, kl_reference, start.subdivision, config.lambda_kl);
    Descent d = descend(start, objective, config);
    if (!d.found)
        throw NumericalFailure("sail refinement produced a non-finite loss");
    FitResult r = finish(d.best, start.subdivision, targets, kl_reference, config.lambda_kl);
    r.iterations = d.iterations;
    d.trace.final_combined = r.loss.combined;
    r.traces.push_back(std::move(d.trace));
    return r;
}

FitResult fit_sail(std::span<const WeightedColor> targets, int bins_per_axis, const ColorHistogram& kl_reference,
                   const FitConfig& config)
{
    config.validate();
    if (targets.empty())
        throw EmptyDistribution("fit_sail: empty support");
    const int s = config.subdivision;
    SailObjective objective(targets, kl_reference, s, config.lambda_kl);

    FitResult best;
    bool have_best = false;
    std::vector<RestartTrace> traces;
    const int starts = config.restarts + (config.extremal_start ? 1 : 0);
    for (int r = 0; r < starts; ++r) {
        const ColorSail start = r < config.restarts
                                    ? init_sail(targets, bins_per_axis, s, mix_seed(config.seed, static_cast<std::uint64_t>(r)))
                                    : extremal_sail(targets, bins_per_axis, s);
        Descent d = descend(start, objective, config);
        if (!d.found) {
            traces.push_back(std::move(d.trace));
            continue;
        }
        FitResult candidate = finish(d.best, s, targets, kl_reference, config.lambda_kl);
        d.trace.final_combined = candidate.loss.combined;
        traces.push_back(std::move(d.trace));
        if (!have_best || candidate.loss.combined < best.loss.combined) {
            best = candidate;
            best.iterations = d.iterations;
            best.restart = r;
            have_best = true;
        }
    }
    if (!have_best)
        throw NumericalFailure("every restart produced a non-finite loss");
    best.traces = std::move(traces);
    return best;
}

FitResult fit_sail(const ColorHistogram& hist, const ColorHistogram& kl_reference, const FitConfig& config)
{
    const auto targets = histogram_targets(hist, config.bin_target);
    return fit_sail(targets, hist.bins_per_axis(), kl_reference, config);
}

FitResult fit_sail(const ColorHistogram& hist, const FitConfig& config) { return fit_sail(hist, hist, config); }

double SweepResult::score(std::size_t k, double complexity_weight) const
{
    return fits[k].loss.combined + complexity_weight * fits[k].sail.subdivision;
}

SweepResult sweep_subdivision(const ColorHistogram& hist, const ColorHistogram& kl_reference, const FitConfig& config)
{
    config.validate();
    std::vector<int> set = config.sweep.empty() ? std::vector<int>{config.subdivision} : config.sweep;
    SweepResult out;
    for (int s : set) {
        FitConfig c = config;
        c.subdivision = s;
        out.fits.push_back(fit_sail(hist, kl_reference, c));
    }
    for (std::size_t k = 1; k < out.fits.size(); ++k) {
        const double a = out.score(k, config.complexity_weight);
        const double b = out.score(out.selected, config.complexity_weight);
        if (a < b || (a == b && out.fits[k].sail.subdivision < out.fits[out.selected].sail.subdivision))
            out.selected = k;
    }
    return out;
}

SweepResult sweep_subdivision(const ColorHistogram& hist, const FitConfig& config)
{
    return sweep_subdivision(hist, hist, config);
}

} // namespace colorsail
