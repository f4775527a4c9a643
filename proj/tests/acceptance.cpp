// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--only 4,6] [--seed N] [--verbose]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli.hpp"
#include "colorsail/alpha_rig.hpp"
#include "colorsail/colorimetry.hpp"
#include "colorsail/fit.hpp"
#include "colorsail/kernels.hpp"
#include "colorsail/metrics.hpp"
#include "colorsail/png_io.hpp"
#include "colorsail/render.hpp"
#include "colorsail/rig.hpp"
#include "colorsail/serialize.hpp"
#include "oracles.hpp"

using namespace colorsail;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
};

std::uint64_t g_seed = 7;
bool g_verbose = false;

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double cpu_seconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

std::string num(double v, int precision = 4)
{
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

double psnr(const Raster& a, const Raster& b)
{
    double mse = 0.0;
    for (std::size_t p = 0; p < a.size(); ++p)
        mse += oracle::dist2(a.pixels[p], b.pixels[p]);
    mse /= 3.0 * static_cast<double>(a.size());
    return mse == 0.0 ? 1e9 : 10.0 * std::log10(1.0 / mse);
}

// ---------------------------------------------------------------- 1

Outcome counting_law()
{
    for (int s = 2; s <= 32; ++s) {
        const auto up = enumerate_grid(s, false).size();
        const auto all = enumerate_grid(s, true).size();
        if (up != static_cast<std::size_t>(s * (s + 1) / 2) || all != static_cast<std::size_t>(s * s))
            return {false, "s=" + std::to_string(s) + ": " + std::to_string(up) + " upright, " +
                               std::to_string(all) + " expanded"};
    }
    return {true, "s in [2, 32]"};
}

// ---------------------------------------------------------------- 2

Outcome geometry_invariants()
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(mix_seed(g_seed, 2));
    double corner = 0.0, planar = 0.0, anti = 0.0, unity = 0.0;
    for (int t = 0; t < 10000; ++t) {
        ColorSail s = oracle::random_sail(rng, 2 + static_cast<int>(rng.index(9)));
        const DecodedSail d = decode(s);
        const std::size_t n = static_cast<std::size_t>(s.subdivision);
        const std::size_t corner_idx[3] = {upright_count(s.subdivision) - 1, n - 1, 0};
        for (int v = 0; v < 3; ++v)
            for (int c = 0; c < 3; ++c)
                corner = std::max(corner, std::fabs(d.colors[corner_idx[v]][c] - s.vertices[v][c]));

        for (const auto& g : enumerate_grid(s.subdivision, true)) {
            const auto b = bernstein_basis(g.bary[0], g.bary[1]);
            unity = std::max(unity, std::fabs(std::accumulate(b.begin(), b.end(), 0.0) - 1.0));
        }

        ColorSail flat = s, neg = s;
        flat.wind = 0.0;
        neg.wind = -s.wind;
        const DecodedSail f = decode(flat), m = decode(neg);
        const Rgb nrm = sail_normal(s);
        const double len = std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]);
        for (std::size_t k = 0; k < d.colors.size(); ++k) {
            if (len > 1e-6) {
                double dot = 0.0;
                for (int c = 0; c < 3; ++c)
                    dot += nrm[c] / len * (f.colors[k][c] - s.vertices[0][c]);
                planar = std::max(planar, std::fabs(dot));
            }
            for (int c = 0; c < 3; ++c)
                anti = std::max(anti, std::fabs((d.colors[k][c] - f.colors[k][c]) + (m.colors[k][c] - f.colors[k][c])));
        }
    }
    const double secs = seconds_since(t0);
    const bool ok = corner <= 1e-12 && planar <= 1e-9 && anti <= 1e-9 && unity <= 1e-12 && secs < 10.0;
    return {ok, "10^4 sails: corner " + num(corner) + ", planarity " + num(planar) + ", antisymmetry " + num(anti) +
                    ", partition " + num(unity) + ", " + num(secs, 3) + " s"};
}

// ---------------------------------------------------------------- 3

Outcome gradient_suite()
{
    Rng rng(mix_seed(g_seed, 3));
    double worst_rel = 0.0;
    std::size_t checked = 0, abs_fallback = 0, failures = 0;
    for (int t = 0; t < 100; ++t) {
        const ColorSail s = oracle::random_sail(rng, 2 + t % 7);
        const SailDecoder dec(s.subdivision, true);
        std::vector<Rgb> colors(dec.size());
        std::vector<ColorJacobian> jac(dec.size());
        dec.colors_and_jacobians(s, colors, jac);
        const SailParams p = pack_params(s);
        std::vector<std::array<double, kSailParams>> fd(dec.size() * 3);
        for (std::size_t k = 0; k < kSailParams; ++k) {
            SailParams hi = p, lo = p;
            hi[k] += 1e-5;
            lo[k] -= 1e-5;
            std::vector<Rgb> ch(dec.size()), cl(dec.size());
            dec.colors(unpack_params(hi, s.subdivision), ch);
            dec.colors(unpack_params(lo, s.subdivision), cl);
            for (std::size_t g = 0; g < dec.size(); ++g)
                for (int c = 0; c < 3; ++c)
                    fd[g * 3 + c][k] = (ch[g][c] - cl[g][c]) / 2e-5;
        }
        for (std::size_t g = 0; g < dec.size(); ++g)
            for (int c = 0; c < 3; ++c)
                for (std::size_t k = 0; k < kSailParams; ++k) {
                    const double a = jac[g][c][k], f = fd[g * 3 + c][k];
                    ++checked;
                    // Entries that vanish analytically only reach FD round-off.
                    if (std::fabs(f) < 1e-7 && std::fabs(a - f) < 1e-9) {
                        ++abs_fallback;
                        continue;
                    }
                    const double rel = std::fabs(a - f) / std::fabs(f);
                    worst_rel = std::max(worst_rel, rel);
                    if (rel >= 1e-4)
                        ++failures;
                }
    }

    double worst_loss = 0.0;
    for (int t = 0; t < 20; ++t) {
        std::vector<WeightedColor> px;
        for (int k = 0; k < 300; ++k)
            px.push_back({{rng.uniform(), rng.uniform(), rng.uniform()}, 1.0});
        const ColorHistogram h = build_histogram(px);
        const auto targets = histogram_targets(h);
        SailObjective obj(targets, h, 3 + t % 4, kDefaultLambdaKl);
        ColorSail start = init_sail(h, mix_seed(g_seed, 300 + t), 3 + t % 4);
        start.wind = rng.uniform(-0.5, 0.5);
        const SailParams p = pack_params(start);
        SailParams grad{};
        obj.evaluate(p, &grad);
        const std::vector<std::uint32_t> frozen(obj.assignment().begin(), obj.assignment().end());
        const auto fd = oracle::central_diff(
            [&](const SailParams& q) { return obj.evaluate_with_assignment(q, frozen, nullptr); }, p, 1e-6);
        double gnorm = 0.0;
        for (double g : fd)
            gnorm = std::max(gnorm, std::fabs(g));
        for (std::size_t k = 0; k < kSailParams; ++k)
            worst_loss = std::max(worst_loss, std::fabs(grad[k] - fd[k]) / std::max(std::fabs(fd[k]), 1e-6 * gnorm));
    }
    const bool ok = failures == 0 && worst_loss < 1e-3;
    return {ok, "Jacobian: " + std::to_string(checked) + " entries, worst rel " + num(worst_rel) + " (" +
                    std::to_string(abs_fallback) + " zero entries within 1e-9 abs), " + std::to_string(failures) +
                    " over 1e-4; loss gradient at init worst rel " + num(worst_loss)};
}

// ---------------------------------------------------------------- 4

ColorSail ground_truth_sail(Rng& rng, int s, double max_wind)
{
    ColorSail g;
    for (auto& v : g.vertices)
        for (auto& c : v)
            c = rng.uniform();
    double u = rng.uniform(), v = rng.uniform();
    if (u + v > 1.0) {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    g.focus_u = u;
    g.focus_v = v;
    g.wind = rng.uniform(-max_wind, max_wind);
    g.subdivision = s;
    return g;
}

Raster noisy_patch(Rng& rng, const std::vector<Rgb>& palette, int side, double sigma)
{
    Raster img(side, side);
    for (auto& p : img.pixels) {
        p = palette[rng.index(palette.size())];
        for (auto& c : p)
            c = clamp01(c + sigma * rng.normal());
    }
    return img;
}

Outcome fit_recovery()
{
    Rng rng(mix_seed(g_seed, 4));
    std::vector<double> times, rp;
    int good = 0;
    double total = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int s = 3 + static_cast<int>(rng.index(6));
        const ColorSail truth = ground_truth_sail(rng, s, 0.8);
        const Raster patch = noisy_patch(rng, decode(truth, true, true).colors, 32, 2.0 / 255.0);
        FitConfig cfg;
        cfg.subdivision = s;
        cfg.seed = mix_seed(g_seed, 400 + t);
        const auto t0 = std::chrono::steady_clock::now();
        const FitResult fit = fit_sail(build_histogram(patch), patchmax_histogram(patch), cfg);
        const double secs = seconds_since(t0);
        const double r = combined_loss(pixel_targets(patch), fit.sail, patchmax_histogram(patch)).r_percent;
        times.push_back(secs);
        rp.push_back(r);
        total += secs;
        good += r >= 0.93;
        if (g_verbose)
            std::cout << "    patch " << t << " s=" << s << " w=" << num(truth.wind, 3) << " R%=" << num(r, 4)
                      << " " << num(secs, 3) << " s\n";
    }
    const double med = median(times);
    const bool ok = good >= 90 && med < 2.0 && total < 300.0;
    return {ok, std::to_string(good) + "/100 with R% >= 0.93 (median R% " + num(median(rp)) + ", min " +
                    num(*std::min_element(rp.begin(), rp.end())) + "), median " + num(med, 3) + " s, total " +
                    num(total, 4) + " s"};
}

// ---------------------------------------------------------------- 5

Outcome kl_trend()
{
    Rng rng(mix_seed(g_seed, 5));
    std::vector<double> kl0, kl1, l20, l21;
    for (int t = 0; t < 50; ++t) {
        Rgb a{}, b{};
        for (int c = 0; c < 3; ++c) {
            a[c] = rng.uniform();
            b[c] = rng.uniform();
        }
        const double split = rng.uniform(0.3, 0.7);
        Raster patch(32, 32);
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) {
                Rgb p = x < split * 32 ? a : b;
                for (auto& c : p)
                    c = clamp01(c + 2.0 / 255.0 * rng.normal());
                patch.at(x, y) = p;
            }
        const ColorHistogram hist = build_histogram(patch);
        const ColorHistogram ref = patchmax_histogram(patch);
        const auto px = pixel_targets(patch);
        for (double lambda : {0.0, 1e-4}) {
            FitConfig cfg;
            cfg.lambda_kl = lambda;
            cfg.seed = mix_seed(g_seed, 500 + t);
            const FitResult fit = fit_sail(hist, ref, cfg);
            const FitLoss l = combined_loss(px, fit.sail, ref, lambda);
            (lambda == 0.0 ? kl0 : kl1).push_back(l.e_kl);
            (lambda == 0.0 ? l20 : l21).push_back(l.e_l2);
        }
    }
    const double mk0 = median(kl0), mk1 = median(kl1), ml0 = median(l20), ml1 = median(l21);
    const double degrade = ml0 > 0.0 ? ml1 / ml0 - 1.0 : 0.0;
    const bool ok = mk1 < mk0 && degrade < 0.10;
    return {ok, "median E_KL " + num(mk0) + " (lambda=0) vs " + num(mk1) + " (lambda=1e-4); median E_L2 " +
                    num(ml0) + " vs " + num(ml1) + " (" + num(100.0 * degrade, 3) + "% change)"};
}

// ---------------------------------------------------------------- 6

struct Composite {
    Raster image;
    std::vector<int> label;   // dominant region per pixel
    int regions = 0;
};

Composite make_composite(Rng& rng, int side)
{
    Composite c;
    c.regions = 2 + static_cast<int>(rng.index(3));
    const int n = c.regions;

    std::vector<Rgb> base;
    while (static_cast<int>(base.size()) < n) {
        const Rgb b{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
        bool far = true;
        for (const auto& o : base)
            far = far && std::sqrt(oracle::dist2(b, o)) >= 0.45;
        if (far)
            base.push_back(b);
    }
    std::vector<ColorSail> sails(n);
    std::vector<std::vector<Rgb>> palettes(n);
    for (int k = 0; k < n; ++k) {
        for (auto& v : sails[k].vertices)
            for (int ch = 0; ch < 3; ++ch)
                v[ch] = clamp01(base[k][ch] + rng.uniform(-0.2, 0.2));
        sails[k].focus_u = rng.uniform(0.2, 0.45);
        sails[k].focus_v = rng.uniform(0.2, 0.45);
        sails[k].wind = rng.uniform(-0.5, 0.5);
        sails[k].subdivision = 4 + static_cast<int>(rng.index(3));
        palettes[k] = decode(sails[k], true, true).colors;
    }

    std::vector<std::array<double, 2>> seeds;
    while (static_cast<int>(seeds.size()) < n) {
        const std::array<double, 2> q{rng.uniform(0.15, 0.85) * side, rng.uniform(0.15, 0.85) * side};
        bool far = true;
        for (const auto& o : seeds)
            far = far && std::hypot(q[0] - o[0], q[1] - o[1]) >= side / 3.0;
        if (far)
            seeds.push_back(q);
    }
    std::vector<std::array<double, 4>> wave(n);
    for (auto& w : wave)
        w = {rng.uniform(0.5, 1.5) / side, rng.uniform(0.5, 1.5) / side, rng.uniform(), rng.uniform()};

    c.image = Raster(side, side);
    c.label.resize(c.image.size());
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            const double px = x + 0.5, py = y + 0.5;
            std::vector<double> alpha(n);
            double sum = 0.0;
            for (int k = 0; k < n; ++k) {
                // Signed distance to the Voronoi cell boundary, 3 px linear ramp.
                double inside = 1e9;
                const double dk = std::pow(px - seeds[k][0], 2) + std::pow(py - seeds[k][1], 2);
                for (int j = 0; j < n; ++j) {
                    if (j == k)
                        continue;
                    const double dj = std::pow(px - seeds[j][0], 2) + std::pow(py - seeds[j][1], 2);
                    const double sep = std::hypot(seeds[j][0] - seeds[k][0], seeds[j][1] - seeds[k][1]);
                    inside = std::min(inside, (dj - dk) / (2.0 * sep));
                }
                alpha[k] = std::clamp(0.5 + inside / 3.0, 0.0, 1.0);
                sum += alpha[k];
            }
            Rgb out{0.0, 0.0, 0.0};
            int best = 0;
            for (int k = 0; k < n; ++k) {
                alpha[k] /= sum;
                if (alpha[k] > alpha[best])
                    best = k;
                double t1 = 0.5 + 0.45 * std::sin(2.0 * std::numbers::pi * (px * wave[k][0] + wave[k][2]));
                double t2 = 0.5 + 0.45 * std::sin(2.0 * std::numbers::pi * (py * wave[k][1] + wave[k][3]));
                if (t1 + t2 > 1.0) {
                    t1 = 1.0 - t1;
                    t2 = 1.0 - t2;
                }
                const int idx = patch_index(sails[k].subdivision, t1, t2, 1.0 - t1 - t2);
                const Rgb& col = palettes[k][static_cast<std::size_t>(std::max(idx, 0))];
                for (int ch = 0; ch < 3; ++ch)
                    out[ch] += alpha[k] * col[ch];
            }
            c.image.at(x, y) = out;
            c.label[static_cast<std::size_t>(y) * side + x] = best;
        }
    return c;
}

double best_permutation_iou(const std::vector<int>& truth, const std::vector<int>& fitted, int n)
{
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            std::size_t inter = 0, uni = 0;
            for (std::size_t p = 0; p < truth.size(); ++p) {
                const bool a = truth[p] == k, b = fitted[p] == perm[k];
                inter += a && b;
                uni += a || b;
            }
            sum += uni ? static_cast<double>(inter) / uni : 1.0;
        }
        best = std::max(best, sum / n);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Outcome rig_recovery()
{
    Rng rng(mix_seed(g_seed, 6));
    const double cpu0 = cpu_seconds();
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> ious, psnrs;
    int selected_ok = 0;
    for (int t = 0; t < 20; ++t) {
        const Composite c = make_composite(rng, 80);
        RigConfig cfg;
        cfg.seed = mix_seed(g_seed, 600 + t);
        const AlphaSelection sel = select_n_alpha(c.image, cfg);
        const auto at = std::find(cfg.candidates.begin(), cfg.candidates.end(), c.regions) - cfg.candidates.begin();
        const RigFit& fit = sel.fits[static_cast<std::size_t>(at)];

        const auto planes = upsample_alphas(fit, c.image.width, c.image.height);
        std::vector<int> label(c.image.size());
        for (std::size_t p = 0; p < label.size(); ++p) {
            int best = 0;
            for (int k = 1; k < fit.n_alpha(); ++k)
                if (planes[k].values[p] > planes[best].values[p])
                    best = k;
            label[p] = best;
        }
        ious.push_back(best_permutation_iou(c.label, label, c.regions));
        psnrs.push_back(psnr(recolor(build_mapping(c.image, fit, "acceptance")), c.image));
        selected_ok += std::abs(sel.n_alpha - c.regions) <= 1;
        if (g_verbose) {
            std::cout << "    composite " << t << " regions=" << c.regions << " selected=" << sel.n_alpha
                      << " IoU=" << num(ious.back(), 4) << " PSNR=" << num(psnrs.back(), 4) << " losses";
            for (double l : sel.losses)
                std::cout << ' ' << num(l, 4);
            std::cout << '\n';
        }
    }
    const double cpu = cpu_seconds() - cpu0;
    const double mean_iou = std::accumulate(ious.begin(), ious.end(), 0.0) / ious.size();
    const double min_psnr = *std::min_element(psnrs.begin(), psnrs.end());
    const bool ok = mean_iou >= 0.8 && min_psnr >= 30.0 && selected_ok >= 15 && cpu < 1800.0;
    return {ok, "mean IoU " + num(mean_iou) + " (min " + num(*std::min_element(ious.begin(), ious.end())) +
                    "), PSNR min " + num(min_psnr) + " dB (median " + num(median(psnrs)) + "), selection within 1 on " +
                    std::to_string(selected_ok) + "/20, CPU " + num(cpu, 4) + " s (wall " +
                    num(seconds_since(t0), 4) + " s)"};
}

// ---------------------------------------------------------------- 7

Raster random_image(Rng& rng, int w, int h)
{
    Raster img(w, h);
    for (auto& p : img.pixels)
        p = {rng.uniform(), rng.uniform(), rng.uniform()};
    return img;
}

std::vector<double> random_alphas(Rng& rng, std::size_t pixels, std::size_t n, bool dyadic)
{
    std::vector<double> a(pixels * n);
    for (std::size_t p = 0; p < pixels; ++p) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            sum += a[p * n + i] = dyadic ? std::floor(rng.uniform() * 16) + 1 : rng.uniform();
        for (std::size_t i = 0; i < n; ++i) {
            a[p * n + i] /= sum;
            if (dyadic)
                a[p * n + i] = std::floor(a[p * n + i] * 256) / 256;
        }
    }
    return a;
}

Outcome oracle_equivalence()
{
    Rng rng(mix_seed(g_seed, 7));
    int mismatches[4] = {0, 0, 0, 0};
    const int trials = 25;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 1 + t % 4;
        const Raster img = random_image(rng, 16, 16);
        std::vector<ColorSail> sails;
        std::vector<std::vector<Rgb>> palettes;
        for (std::size_t i = 0; i < n; ++i) {
            sails.push_back(oracle::random_sail(rng, 2 + static_cast<int>(rng.index(9))));
            palettes.push_back(decode(sails.back(), true, true).colors);
        }
        const auto alphas = random_alphas(rng, img.size(), n, false);
        mismatches[0] += !(reconstruct(img, alphas, sails) == oracle::reconstruct(img, alphas, palettes));

        RigFit fit;
        fit.width = fit.height = 16;
        fit.sails = sails;
        fit.alphas = alphas;
        const SailRig rig = build_mapping(img, fit, "oracle");
        bool same = true;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t p = 0; p < img.size(); ++p)
                same = same && rig.layers[i].index[p] == oracle::nearest(img.pixels[p], palettes[i]) &&
                       rig.layers[i].alpha[p] == oracle::quantize(alphas[p * n + i]);
        mismatches[1] += !same;

        const int new_s = 2 + static_cast<int>(rng.index(12));
        const SailRig remapped = remap_subdivision(rig, 0, new_s);
        std::vector<std::array<double, 3>> target;
        for (const auto& g : enumerate_grid(new_s, true))
            target.push_back(g.bary);
        const auto from = enumerate_grid(sails[0].subdivision, true);
        same = remapped.layers[0].sail.subdivision == new_s;
        for (std::size_t p = 0; p < img.size(); ++p)
            same = same && remapped.layers[0].index[p] == oracle::snap(from[rig.layers[0].index[p]].bary, target);
        mismatches[2] += !same;

        // Dyadic masks keep every partial sum exact, so any summation order agrees.
        const auto dy = random_alphas(rng, img.size(), n, true);
        mismatches[3] += tv_penalty(dy, 16, 16, static_cast<int>(n)) != oracle::tv(dy, 16, 16, static_cast<int>(n));
    }
    const bool ok = mismatches[0] + mismatches[1] + mismatches[2] + mismatches[3] == 0;
    return {ok, std::to_string(trials) + " instances each; mismatches: reconstruct " + std::to_string(mismatches[0]) +
                    ", build_mapping " + std::to_string(mismatches[1]) + ", remap_subdivision " +
                    std::to_string(mismatches[2]) + ", tv_penalty " + std::to_string(mismatches[3])};
}

// ---------------------------------------------------------------- 8

int cli_run(std::vector<std::string> args, std::string* out = nullptr)
{
    args.insert(args.begin(), "colorsail");
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (out)
        *out = o.str();
    if (code != 0)
        std::cerr << "    cli: " << e.str();
    return code;
}

bool same_tree(const fs::path& a, const fs::path& b)
{
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(a))
        names.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b))
        names.insert(e.path().filename().string());
    for (const auto& n : names)
        if (!fs::exists(a / n) || !fs::exists(b / n) || slurp(a / n) != slurp(b / n))
            return false;
    return true;
}

Outcome determinism()
{
    const fs::path dir = fs::temp_directory_path() / "colorsail_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir / "imgs");
    Rng rng(mix_seed(g_seed, 8));
    const Composite c = make_composite(rng, 40);
    png::write_rgb8(dir / "img.png", c.image);
    png::write_rgb8(dir / "imgs" / "img.png", c.image);

    std::vector<std::string> failed;
    std::string f1, f2;
    const auto img = (dir / "img.png").string();
    if (cli_run({"fit", img, "--json", "--seed", "11"}, &f1) || cli_run({"fit", img, "--json", "--seed", "11"}, &f2) ||
        f1 != f2)
        failed.push_back("fit JSON");

    std::string r1, r2;
    const std::vector<std::string> rig_args{"rig", img, "--candidates", "2,3", "--seed", "11", "--json", "-o"};
    auto with = [](std::vector<std::string> v, const std::string& extra) {
        v.push_back(extra);
        return v;
    };
    if (cli_run(with(rig_args, (dir / "b1").string()), &r1) || cli_run(with(rig_args, (dir / "b2").string()), &r2) ||
        !same_tree(dir / "b1", dir / "b2"))
        failed.push_back("rig bundle");

    std::string a1, a2;
    if (cli_run({"analyze", (dir / "imgs").string(), "--json", "-o", (dir / "a1.csv").string()}, &a1) ||
        cli_run({"analyze", (dir / "imgs").string(), "--json", "-o", (dir / "a2.csv").string()}, &a2) ||
        slurp(dir / "a1.csv") != slurp(dir / "a2.csv"))
        failed.push_back("analyze CSV");

    bool round_trip = false;
    try {
        const SailRig rig = load_rig(dir / "b1");
        save_rig(rig, dir / "b3");
        fs::copy_file(dir / "b1" / "reconstruction.png", dir / "b3" / "reconstruction.png");
        round_trip = same_tree(dir / "b1", dir / "b3") && load_rig(dir / "b3") == rig;
    } catch (const std::exception& e) {
        std::cerr << "    " << e.what() << '\n';
    }
    if (!round_trip)
        failed.push_back("save/load/save");

    write_text(dir / "none.json", "[]");
    if (cli_run({"recolor", (dir / "b1").string(), (dir / "none.json").string(), "-o", (dir / "r.png").string()}) ||
        slurp(dir / "r.png") != slurp(dir / "b1" / "reconstruction.png"))
        failed.push_back("recolor(empty)");

    fs::remove_all(dir);
    if (failed.empty())
        return {true, "fit JSON, rig bundle and analyze CSV byte-identical across runs; save/load/save identical; "
                      "recolor with no edits equals reconstruction.png"};
    std::string d = "failed:";
    for (const auto& f : failed)
        d += " " + f;
    return {false, d};
}

// ---------------------------------------------------------------- 9

Outcome scope_note()
{
    return {true, "learned-network percentiles and GPU forward-pass timing are not reproducible here; criteria 4-6 "
                  "substitute synthetic recovery. This binary links only the C++ library and CLI (no editor build); "
                  "kernel ISA: " + std::string(kernels::to_string(kernels::active_isa()))};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"colorsail acceptance suite"};
    std::string only;
    app.add_option("--only", only, "Comma-separated criterion ids");
    app.add_option("--seed", g_seed, "Seed for the synthetic data");
    app.add_flag("-v,--verbose", g_verbose, "Per-instance details");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "counting law", counting_law},
        {2, "geometry invariants", geometry_invariants},
        {3, "gradient suite", gradient_suite},
        {4, "fit recovery", fit_recovery},
        {5, "KL-regularization trend", kl_trend},
        {6, "rig recovery", rig_recovery},
        {7, "oracle equivalence", oracle_equivalence},
        {8, "determinism and round-trip", determinism},
        {9, "non-reproducible results and standalone suite", scope_note},
    };
    std::set<int> selected;
    if (!only.empty())
        for (int id : cli::parse_int_set(only))
            selected.insert(id);

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << ": " << o.detail << "  ("
                  << num(seconds_since(t0), 3) << " s)" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
