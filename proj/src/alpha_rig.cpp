#include "colorsail/alpha_rig.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "colorsail/cluster.hpp"
#include "colorsail/colorimetry.hpp"
#include "colorsail/error.hpp"
#include "colorsail/kernels.hpp"

namespace colorsail {

void tempered_softmax(std::span<const double> z, double tau, std::span<double> out)
{
    if (!(tau > 0.0))
        throw InvalidArgument("softmax temperature must be > 0");
    if (z.empty())
        return;
    double top = z[0];
    for (double v : z)
        top = std::max(top, v);
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp((z[i] - top) / tau);
        sum += out[i];
    }
    for (std::size_t i = 0; i < z.size(); ++i)
        out[i] /= sum;
}

std::vector<double> tempered_softmax(std::span<const double> z, double tau)
{
    std::vector<double> out(z.size());
    tempered_softmax(z, tau, out);
    return out;
}

AlphaField::AlphaField(int w, int h, int n, double temperature)
    : width(w), height(h), n_alpha(n), tau(temperature),
      logits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(n), 0.0)
{
    if (n < 1)
        throw InvalidArgument("alpha field needs at least one mask");
    if (!(temperature > 0.0))
        throw InvalidArgument("softmax temperature must be > 0");
}

std::vector<double> AlphaField::alphas() const
{
    std::vector<double> a(logits.size());
    const auto n = static_cast<std::size_t>(n_alpha);
    for (std::size_t p = 0; p < pixel_count(); ++p)
        tempered_softmax(std::span<const double>(logits).subspan(p * n, n), tau, std::span<double>(a).subspan(p * n, n));
    return a;
}

std::vector<Plane> split_planes(std::span<const double> alphas, int width, int height, int n_alpha)
{
    std::vector<Plane> planes(static_cast<std::size_t>(n_alpha), Plane(width, height));
    const std::size_t count = static_cast<std::size_t>(width) * height;
    if (alphas.size() != count * n_alpha)
        throw InvalidArgument("alpha buffer does not match dimensions");
    for (std::size_t p = 0; p < count; ++p)
        for (int i = 0; i < n_alpha; ++i)
            planes[i].values[p] = alphas[p * n_alpha + i];
    return planes;
}

std::vector<double> interleave_planes(std::span<const Plane> planes)
{
    if (planes.empty())
        return {};
    const std::size_t n = planes.size();
    const std::size_t count = planes[0].values.size();
    std::vector<double> out(count * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (planes[i].values.size() != count)
            throw InvalidArgument("mask planes differ in size");
        for (std::size_t p = 0; p < count; ++p)
            out[p * n + i] = planes[i].values[p];
    }
    return out;
}

namespace {

kernels::ColorPlanes image_planes(const Raster& image) { return kernels::ColorPlanes(image.pixels); }

// Per pixel, the clamped decoded color of `sail` nearest to the pixel.
kernels::ColorPlanes nearest_layer(const kernels::ColorPlanes& pixels, const ColorSail& sail)
{
    const DecodedSail decoded = decode(sail, true, true);
    std::vector<std::uint32_t> index(pixels.size());
    std::vector<double> d2(pixels.size());
    kernels::nearest_colors(pixels, decoded.colors, index, d2);
    kernels::ColorPlanes out(pixels.size());
    for (std::size_t p = 0; p < pixels.size(); ++p)
        out.set(p, decoded.colors[index[p]]);
    return out;
}

std::vector<kernels::ColorPlanes> nearest_layers(const kernels::ColorPlanes& pixels, std::span<const ColorSail> sails)
{
    std::vector<kernels::ColorPlanes> layers;
    layers.reserve(sails.size());
    for (const auto& s : sails)
        layers.push_back(nearest_layer(pixels, s));
    return layers;
}

kernels::ColorPlanes blend_layers(std::span<const double> alphas, std::span<const kernels::ColorPlanes> layers,
                                  std::size_t pixel_count)
{
    const std::size_t n = layers.size();
    kernels::ColorPlanes out(pixel_count);
    std::vector<double> weight(pixel_count);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < pixel_count; ++p)
            weight[p] = alphas[p * n + i];
        kernels::accumulate_weighted(weight, layers[i], out);
    }
    return out;
}

double mean_distance(const kernels::ColorPlanes& a, const kernels::ColorPlanes& b)
{
    double sum = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) {
        const double dr = a.r[p] - b.r[p], dg = a.g[p] - b.g[p], db = a.b[p] - b.b[p];
        sum += std::sqrt((dr * dr + dg * dg) + db * db);
    }
    return sum / static_cast<double>(a.size());
}

double mean_squared_distance(const kernels::ColorPlanes& a, const kernels::ColorPlanes& b)
{
    double sum = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p) {
        const double dr = a.r[p] - b.r[p], dg = a.g[p] - b.g[p], db = a.b[p] - b.b[p];
        sum += (dr * dr + dg * dg) + db * db;
    }
    return sum / static_cast<double>(a.size());
}

void check_alphas(const Raster& image, std::span<const double> alphas, std::size_t n)
{
    if (n == 0)
        throw InvalidArgument("need at least one sail");
    if (alphas.size() != image.size() * n)
        throw InvalidArgument("alpha buffer does not match image and sail count");
}

} // namespace

Raster reconstruct(const Raster& image, std::span<const double> alphas, std::span<const ColorSail> sails)
{
    check_alphas(image, alphas, sails.size());
    const auto pixels = image_planes(image);
    const auto layers = nearest_layers(pixels, sails);
    const auto blended = blend_layers(alphas, layers, image.size());
    Raster out(image.width, image.height);
    for (std::size_t p = 0; p < out.size(); ++p)
        out.pixels[p] = blended.get(p);
    return out;
}

Raster reconstruct(const Raster& image, const AlphaField& field, std::span<const ColorSail> sails)
{
    if (field.width != image.width || field.height != image.height)
        throw InvalidArgument("alpha field and image dimensions differ");
    if (static_cast<std::size_t>(field.n_alpha) != sails.size())
        throw InvalidArgument("sail count differs from mask count");
    return reconstruct(image, field.alphas(), sails);
}

double tv_penalty(std::span<const double> a, int width, int height, int n)
{
    const std::size_t count = static_cast<std::size_t>(width) * height;
    if (a.size() != count * n)
        throw InvalidArgument("alpha buffer does not match dimensions");
    if (count == 0)
        return 0.0;
    auto at = [&](int x, int y, int i) { return a[(static_cast<std::size_t>(y) * width + x) * n + i]; };
    double sum = 0.0;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int i = 0; i < n; ++i) {
                if (x + 1 < width)
                    sum += std::abs(at(x + 1, y, i) - at(x, y, i));
                if (y + 1 < height)
                    sum += std::abs(at(x, y + 1, i) - at(x, y, i));
            }
    return sum / (static_cast<double>(count) * n);
}

double tv_penalty(const AlphaField& field)
{
    return tv_penalty(field.alphas(), field.width, field.height, field.n_alpha);
}

void RigConfig::validate() const
{
    if (!(tau > 0.0))
        throw InvalidArgument("tau must be > 0");
    if (!(tv_weight >= 0.0))
        throw InvalidArgument("tv weight must be >= 0");
    if (!(logit_adam.learning_rate > 0.0))
        throw InvalidArgument("logit learning rate must be > 0");
    if (epochs < 0 || steps_per_epoch < 1 || refit_iterations < 1)
        throw InvalidArgument("invalid alternation schedule");
    if (max_side < 1)
        throw InvalidArgument("max_side must be >= 1");
    if (candidates.empty())
        throw InvalidArgument("candidate set must be nonempty");
    for (int n : candidates)
        if (n < 1 || n > 8)
            throw InvalidArgument("candidate mask counts must lie in [1, 8]");
    if (!(alpha_penalty >= 0.0))
        throw InvalidArgument("alpha penalty must be >= 0");
    sail_fit.validate();
}

RigLoss rig_loss(const Raster& image, std::span<const double> alphas, std::span<const ColorSail> sails,
                 double tv_weight)
{
    check_alphas(image, alphas, sails.size());
    const auto pixels = image_planes(image);
    const auto layers = nearest_layers(pixels, sails);
    const auto blended = blend_layers(alphas, layers, image.size());
    RigLoss loss;
    loss.recon = mean_distance(blended, pixels);
    loss.mse = mean_squared_distance(blended, pixels);
    loss.tv = tv_penalty(alphas, image.width, image.height, static_cast<int>(sails.size()));
    loss.total = loss.recon + tv_weight * loss.tv;
    return loss;
}

namespace {

class RigOptimizer {
public:
    RigOptimizer(const Raster& image, int n, const RigConfig& config)
        : image_(image), n_(static_cast<std::size_t>(n)), config_(config), pixels_(image_planes(image))
    {
    }

    // Objective and (optionally) gradient w.r.t. logits, with the per-sail
    // nearest colors (layers) held fixed.
    double objective(const AlphaField& field, const std::vector<kernels::ColorPlanes>& layers,
                     std::vector<double>* grad) const
    {
        const std::size_t count = field.pixel_count();
        const std::vector<double> a = field.alphas();
        const auto blended = blend_layers(a, layers, count);
        const double inv_count = 1.0 / static_cast<double>(count);

        double recon = 0.0;
        std::vector<double> ga;
        if (grad)
            ga.assign(a.size(), 0.0);
        for (std::size_t p = 0; p < count; ++p) {
            const double dr = blended.r[p] - pixels_.r[p];
            const double dg = blended.g[p] - pixels_.g[p];
            const double db = blended.b[p] - pixels_.b[p];
            const double d = std::sqrt((dr * dr + dg * dg) + db * db);
            recon += d;
            if (grad && d > 0.0) {
                const double s = inv_count / d;
                for (std::size_t i = 0; i < n_; ++i)
                    ga[p * n_ + i] = s * (dr * layers[i].r[p] + dg * layers[i].g[p] + db * layers[i].b[p]);
            }
        }
        recon *= inv_count;

        const int w = field.width, h = field.height;
        const int n = static_cast<int>(n_);
        const double tv_scale = 1.0 / (static_cast<double>(count) * n);
        double tv = 0.0;
        auto idx = [&](int x, int y, int i) { return (static_cast<std::size_t>(y) * w + x) * n + i; };
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                for (int i = 0; i < n; ++i) {
                    const std::size_t here = idx(x, y, i);
                    if (x + 1 < w) {
                        const double diff = a[idx(x + 1, y, i)] - a[here];
                        tv += std::abs(diff);
                        if (grad && diff != 0.0) {
                            const double s = config_.tv_weight * tv_scale * (diff > 0.0 ? 1.0 : -1.0);
                            ga[idx(x + 1, y, i)] += s;
                            ga[here] -= s;
                        }
                    }
                    if (y + 1 < h) {
                        const double diff = a[idx(x, y + 1, i)] - a[here];
                        tv += std::abs(diff);
                        if (grad && diff != 0.0) {
                            const double s = config_.tv_weight * tv_scale * (diff > 0.0 ? 1.0 : -1.0);
                            ga[idx(x, y + 1, i)] += s;
                            ga[here] -= s;
                        }
                    }
                }
        tv *= tv_scale;

        if (grad) {
            grad->assign(a.size(), 0.0);
            for (std::size_t p = 0; p < count; ++p) {
                double mean = 0.0;
                for (std::size_t i = 0; i < n_; ++i)
                    mean += a[p * n_ + i] * ga[p * n_ + i];
                for (std::size_t i = 0; i < n_; ++i)
                    (*grad)[p * n_ + i] = a[p * n_ + i] * (ga[p * n_ + i] - mean) / field.tau;
            }
        }
        return recon + config_.tv_weight * tv;
    }

    // Sail fitted to the soft histogram of mask i. Returns `start` unchanged if the mask is empty.
    ColorSail fit_mask(const std::vector<double>& alphas, std::size_t i, const ColorSail* start,
                       std::uint64_t seed) const
    {
        std::vector<double> weights(image_.size());
        for (std::size_t p = 0; p < weights.size(); ++p)
            weights[p] = alphas[p * n_ + i];
        const int bins = 10;
        ColorHistogram hist(bins);
        try {
            hist = build_histogram(image_, weights, bins);
        } catch (const EmptyDistribution&) {
            if (start)
                return *start;
            hist = build_histogram(image_, bins);
        }
        FitConfig fc = config_.sail_fit;
        fc.seed = seed;
        if (start) {
            fc.max_iterations = config_.refit_iterations;
            const auto targets = histogram_targets(hist, fc.bin_target);
            return refine_sail(*start, targets, hist, fc).sail;
        }
        return fit_sail(hist, fc).sail;
    }

    const kernels::ColorPlanes& pixels() const { return pixels_; }

private:
    const Raster& image_;
    std::size_t n_;
    const RigConfig& config_;
    kernels::ColorPlanes pixels_;
};

std::vector<WeightedColor> lab_points(const Raster& image)
{
    std::vector<WeightedColor> pts;
    pts.reserve(image.size());
    for (const auto& c : image.pixels) {
        const LabColor lab = srgb_to_lab(c);
        pts.push_back({{lab.L, lab.a, lab.b}, 1.0});
    }
    return pts;
}

} // namespace

RigFit fit_rig(const Raster& image, int n_alpha, const RigConfig& config)
{
    config.validate();
    if (n_alpha < 1 || n_alpha > 8)
        throw InvalidArgument("n_alpha must lie in [1, 8]");
    if (image.empty())
        throw InvalidArgument("fit_rig: empty image");

    const Raster work = fit_within(image, config.max_side);
    const std::size_t n = static_cast<std::size_t>(n_alpha);
    RigOptimizer opt(work, n_alpha, config);

    AlphaField field(work.width, work.height, n_alpha, config.tau);
    const KMeansResult km = kmeans(lab_points(work), n_alpha, mix_seed(config.seed, 101), 50);
    for (std::size_t p = 0; p < field.pixel_count(); ++p)
        field.logits[p * n + static_cast<std::size_t>(km.labels[p])] = config.init_logit;

    std::vector<ColorSail> sails;
    {
        const auto a = field.alphas();
        for (std::size_t i = 0; i < n; ++i)
            sails.push_back(opt.fit_mask(a, i, nullptr, mix_seed(config.seed, 200 + i)));
    }
    auto layers = nearest_layers(opt.pixels(), sails);

    RigFit fit;
    double accepted = opt.objective(field, layers, nullptr);
    fit.epoch_objective.push_back(accepted);
    AlphaField accepted_field = field;
    std::vector<ColorSail> accepted_sails = sails;
    auto accepted_layers = layers;

    Adam adam(field.logits.size(), config.logit_adam);
    std::vector<double> grad;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (int step = 0; step < config.steps_per_epoch; ++step) {
            opt.objective(field, layers, &grad);
            adam.step(field.logits, grad);
        }
        const double after_logits = opt.objective(field, layers, nullptr);

        const auto a = field.alphas();
        std::vector<ColorSail> refit;
        for (std::size_t i = 0; i < n; ++i)
            refit.push_back(opt.fit_mask(a, i, &sails[i], mix_seed(config.seed, 1000 + 31 * epoch + i)));
        auto refit_layers = nearest_layers(opt.pixels(), refit);
        const double after_refit = opt.objective(field, refit_layers, nullptr);
        if (after_refit <= after_logits) {
            sails = std::move(refit);
            layers = std::move(refit_layers);
        }
        const double epoch_value = std::min(after_logits, after_refit);

        if (!std::isfinite(epoch_value) || epoch_value > accepted) {
            // Roll back to the last accepted state and take smaller logit steps.
            field = accepted_field;
            sails = accepted_sails;
            layers = accepted_layers;
            adam.reset();
            adam.settings().learning_rate *= 0.5;
        } else {
            accepted = epoch_value;
            accepted_field = field;
            accepted_sails = sails;
            accepted_layers = layers;
        }
        fit.epoch_objective.push_back(accepted);
    }

    fit.width = work.width;
    fit.height = work.height;
    fit.alphas = accepted_field.alphas();
    fit.sails = accepted_sails;
    fit.loss = rig_loss(work, fit.alphas, fit.sails, config.tv_weight);
    fit.reconstruction = reconstruct(work, fit.alphas, fit.sails);
    fit.field = std::move(accepted_field);
    return fit;
}

RigFit fit_sails_to_masks(const Raster& image, std::span<const Plane> masks, const RigConfig& config)
{
    config.validate();
    if (masks.empty())
        throw InvalidArgument("need at least one mask");
    for (const auto& m : masks)
        if (m.width != image.width || m.height != image.height)
            throw InvalidArgument("mask dimensions differ from the image");

    const std::size_t n = masks.size();
    std::vector<double> alphas = interleave_planes(masks);
    for (std::size_t p = 0; p < image.size(); ++p) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            sum += std::max(0.0, alphas[p * n + i]);
        for (std::size_t i = 0; i < n; ++i)
            alphas[p * n + i] = sum > 0.0 ? std::max(0.0, alphas[p * n + i]) / sum : 1.0 / static_cast<double>(n);
    }

    RigOptimizer opt(image, static_cast<int>(n), config);
    RigFit fit;
    fit.width = image.width;
    fit.height = image.height;
    for (std::size_t i = 0; i < n; ++i)
        fit.sails.push_back(opt.fit_mask(alphas, i, nullptr, mix_seed(config.seed, 200 + i)));
    fit.alphas = std::move(alphas);
    fit.loss = rig_loss(image, fit.alphas, fit.sails, config.tv_weight);
    fit.reconstruction = reconstruct(image, fit.alphas, fit.sails);
    fit.epoch_objective.push_back(fit.loss.total);
    return fit;
}

double selection_loss(const RigLoss& loss, double tv_weight, SelectionUnits units)
{
    const double recon = units == SelectionUnits::mse_255 ? 255.0 * 255.0 * loss.mse : 255.0 * loss.recon;
    return recon + 255.0 * tv_weight * loss.tv;
}

std::size_t select_by_score(std::span<const int> counts, std::span<const double> losses, double penalty)
{
    if (counts.empty() || counts.size() != losses.size())
        throw InvalidArgument("select_by_score: mismatched or empty inputs");
    std::size_t best = 0;
    for (std::size_t k = 1; k < counts.size(); ++k) {
        const double a = losses[k] + penalty * counts[k];
        const double b = losses[best] + penalty * counts[best];
        if (a < b || (a == b && counts[k] < counts[best]))
            best = k;
    }
    return best;
}

AlphaSelection select_n_alpha(const Raster& image, const RigConfig& config)
{
    config.validate();
    AlphaSelection sel;
    sel.candidates = config.candidates;
    std::vector<RigFit> fits;
    if (config.parallel && config.candidates.size() > 1) {
        std::vector<std::future<RigFit>> jobs;
        for (int n : config.candidates)
            jobs.push_back(std::async(std::launch::async, [&image, &config, n] { return fit_rig(image, n, config); }));
        for (auto& j : jobs)
            fits.push_back(j.get());
    } else {
        for (int n : config.candidates)
            fits.push_back(fit_rig(image, n, config));
    }
    for (std::size_t k = 0; k < fits.size(); ++k) {
        sel.losses.push_back(selection_loss(fits[k].loss, config.tv_weight, config.selection_units));
        sel.scores.push_back(sel.losses.back() + config.alpha_penalty * config.candidates[k]);
    }
    const std::size_t best = select_by_score(config.candidates, sel.losses, config.alpha_penalty);
    sel.n_alpha = config.candidates[best];
    sel.fit = fits[best];
    sel.fits = std::move(fits);
    return sel;
}

std::vector<Plane> upsample_alphas(const RigFit& fit, int width, int height)
{
    auto planes = split_planes(fit.alphas, fit.width, fit.height, fit.n_alpha());
    if (fit.width == width && fit.height == height)
        return planes;
    for (auto& p : planes)
        p = resize_bilinear(p, width, height);
    return planes;
}

} // namespace colorsail
