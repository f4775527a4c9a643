#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "colorsail/alpha_rig.hpp"
#include "colorsail/colorimetry.hpp"
#include "colorsail/error.hpp"
#include "colorsail/fit.hpp"
#include "colorsail/metrics.hpp"
#include "colorsail/png_io.hpp"
#include "colorsail/random.hpp"
#include "colorsail/render.hpp"
#include "colorsail/rig.hpp"
#include "colorsail/serialize.hpp"

namespace fs = std::filesystem;

namespace colorsail::cli {

std::vector<int> parse_int_set(const std::string& text)
{
    auto to_int = [&](const std::string& t) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(t, &used);
        } catch (const std::exception&) {
            throw InvalidArgument("not an integer: '" + t + "'");
        }
        if (used != t.size())
            throw InvalidArgument("not an integer: '" + t + "'");
        return v;
    };
    std::vector<int> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const int lo = to_int(text.substr(0, dots));
        const int hi = to_int(text.substr(dots + 2));
        if (hi < lo)
            throw InvalidArgument("empty range '" + text + "'");
        for (int v = lo; v <= hi; ++v)
            out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ','))
        out.push_back(to_int(part));
    if (out.empty())
        throw InvalidArgument("empty integer list");
    return out;
}

std::vector<std::pair<int, int>> sample_patches(int width, int height, int count, std::uint64_t seed)
{
    const int pw = std::min(kPatchSide, width);
    const int ph = std::min(kPatchSide, height);
    Rng rng(seed);
    auto draw = [&rng](int side, int patch) {
        const double lo = patch / 2.0, hi = side - patch / 2.0;
        const double mean = side / 2.0, sigma = side / 4.0;
        double c = mean;
        for (int tries = 0; tries < 64; ++tries) {
            const double v = mean + sigma * rng.normal();
            if (v >= lo && v <= hi) {
                c = v;
                break;
            }
        }
        const int left = static_cast<int>(std::floor(c - patch / 2.0));
        return std::clamp(left, 0, side - patch);
    };
    std::vector<std::pair<int, int>> out;
    for (int k = 0; k < count; ++k) {
        const int x = draw(width, pw);
        const int y = draw(height, ph);
        out.emplace_back(x, y);
    }
    return out;
}

ImageAnalysis analyze_raster(const Raster& input, int patches, std::uint64_t seed)
{
    ImageAnalysis a;
    a.width = input.width;
    a.height = input.height;
    a.colorfulness = colorfulness(input);
    const Raster image = fit_within(input, kAnalyzeMaxSide);
    const int pw = std::min(kPatchSide, image.width);
    const int ph = std::min(kPatchSide, image.height);
    double entropy_sum = 0.0;
    for (const auto& [x0, y0] : sample_patches(image.width, image.height, patches, seed)) {
        Raster patch(pw, ph);
        for (int y = 0; y < ph; ++y)
            for (int x = 0; x < pw; ++x)
                patch.at(x, y) = image.at(x0 + x, y0 + y);
        const double h = histogram_entropy(build_histogram(patch));
        entropy_sum += h;
        switch (hardness_of(h)) {
        case Hardness::easy: ++a.easy; break;
        case Hardness::medium: ++a.medium; break;
        case Hardness::hard: ++a.hard; break;
        }
        const int bin = std::min(kEntropyBins - 1, static_cast<int>(std::floor(h)));
        ++a.entropy_hist[static_cast<std::size_t>(bin)];
        ++a.patches;
    }
    a.mean_entropy = a.patches > 0 ? entropy_sum / a.patches : 0.0;
    return a;
}

std::string analysis_csv_header()
{
    std::string h = "file,width,height,colorfulness,patches,easy,medium,hard,mean_entropy";
    for (int b = 0; b < kEntropyBins; ++b)
        h += ",entropy_" + std::to_string(b);
    return h;
}

std::string analysis_csv_row(const ImageAnalysis& a)
{
    std::ostringstream os;
    os << a.file << ',' << a.width << ',' << a.height << ',' << std::fixed << std::setprecision(6) << a.colorfulness
       << ',' << a.patches << ',' << a.easy << ',' << a.medium << ',' << a.hard << ',' << a.mean_entropy;
    for (int c : a.entropy_hist)
        os << ',' << c;
    return os.str();
}

namespace {

struct Options {
    std::string input;
    std::string second;
    std::string output;
    std::string subdivision;
    double lambda_kl = kDefaultLambdaKl;
    int restarts = 5;
    std::uint64_t seed = kDefaultSeed;
    int n_alpha = 0;
    std::string candidates = "2,3,4,5";
    double penalty = kDefaultAlphaPenalty;
    std::string alphas;
    std::string original;
    int size = 256;
    int patches = 100;
    bool json = false;
};

FitConfig fit_config(const Options& o)
{
    FitConfig c;
    c.lambda_kl = o.lambda_kl;
    c.restarts = o.restarts;
    c.seed = o.seed;
    if (!o.subdivision.empty()) {
        const auto set = parse_int_set(o.subdivision);
        c.subdivision = set.front();
        if (set.size() > 1)
            c.sweep = set;
    }
    c.validate();
    return c;
}

Raster read_image(const std::string& path)
{
    if (!fs::is_regular_file(path))
        throw IoError("cannot read " + path);
    return png::read_rgb(path);
}

void emit(std::ostream& out, const std::string& output, const ordered_json& j)
{
    if (!output.empty())
        write_text(output, dump(j));
    else
        out << dump(j);
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

int cmd_fit(const Options& o, std::ostream& out)
{
    const FitConfig config = fit_config(o);
    const Raster image = read_image(o.input);
    const ColorHistogram hist = build_histogram(image);
    const ColorHistogram reference = patchmax_histogram(image);
    const auto pixels = pixel_targets(image);

    ordered_json report;
    auto record = [&](const FitResult& fit) {
        ordered_json j;
        j["sail"] = sail_to_json(fit.sail);
        j["loss"] = fit_loss_to_json(combined_loss(pixels, fit.sail, reference, config.lambda_kl));
        j["iterations"] = fit.iterations;
        j["restart"] = fit.restart;
        return j;
    };

    if (config.sweep.empty()) {
        report = record(fit_sail(hist, reference, config));
    } else {
        const SweepResult sweep = sweep_subdivision(hist, reference, config);
        report = record(sweep.fits[sweep.selected]);
        report["sweep"] = ordered_json::array();
        for (std::size_t k = 0; k < sweep.fits.size(); ++k) {
            ordered_json row;
            row["subdivision"] = sweep.fits[k].sail.subdivision;
            row["loss"] = fit_loss_to_json(combined_loss(pixels, sweep.fits[k].sail, reference, config.lambda_kl));
            row["score"] = sweep.score(k, config.complexity_weight);
            report["sweep"].push_back(row);
        }
    }

    if (o.json || !o.output.empty()) {
        emit(out, o.json ? std::string() : o.output, report);
        if (o.json && !o.output.empty())
            write_text(o.output, dump(report));
    }
    if (!o.json) {
        if (report.contains("sweep")) {
            out << "s\te_l2\te_kl\tr_percent\tcombined\tscore\n";
            for (const auto& row : report["sweep"])
                out << row["subdivision"].get<int>() << '\t' << fmt(row["loss"]["e_l2"].get<double>()) << '\t'
                    << fmt(row["loss"]["e_kl"].get<double>()) << '\t'
                    << fmt(row["loss"]["r_percent"].get<double>()) << '\t'
                    << fmt(row["loss"]["combined"].get<double>()) << '\t' << fmt(row["score"].get<double>()) << '\n';
        }
        const auto& s = report["sail"];
        out << "sail: " << s.dump() << '\n';
        const auto& l = report["loss"];
        out << "e_l2 " << fmt(l["e_l2"].get<double>()) << "  e_kl " << fmt(l["e_kl"].get<double>())
            << "  R% (delta=10) " << fmt(l["r_percent"].get<double>()) << "  combined "
            << fmt(l["combined"].get<double>()) << '\n';
    }
    return kOk;
}

std::vector<Plane> read_masks(const std::string& dir, int width, int height)
{
    if (!fs::is_directory(dir))
        throw IoError("mask directory not found: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw InvalidArgument("no PNG masks in " + dir);
    std::vector<Plane> masks;
    for (const auto& f : files) {
        const png::Image img = png::read(f);
        if (img.width != width || img.height != height)
            throw InvalidArgument("mask " + f.filename().string() + " is " + std::to_string(img.width) + "x" +
                                  std::to_string(img.height) + ", image is " + std::to_string(width) + "x" +
                                  std::to_string(height));
        if (img.channels != 1)
            throw InvalidArgument("mask " + f.filename().string() + " must be grayscale");
        const double scale = img.bit_depth == 16 ? 65535.0 : 255.0;
        Plane p(width, height);
        for (std::size_t k = 0; k < p.values.size(); ++k)
            p.values[k] = img.samples[k] / scale;
        masks.push_back(std::move(p));
    }
    return masks;
}

int cmd_rig(const Options& o, std::ostream& out)
{
    if (o.output.empty())
        throw InvalidArgument("rig: --output directory is required");
    RigConfig config;
    config.sail_fit = fit_config(o);
    config.sail_fit.sweep.clear();
    config.seed = o.seed;
    config.alpha_penalty = o.penalty;
    config.candidates = parse_int_set(o.candidates);
    if (o.n_alpha != 0)
        config.candidates = {o.n_alpha};
    config.validate();
    const Raster image = read_image(o.input);

    ordered_json report;
    RigFit fit;
    if (!o.alphas.empty()) {
        const auto masks = read_masks(o.alphas, image.width, image.height);
        fit = fit_sails_to_masks(image, masks, config);
        report["mode"] = "masks";
    } else if (o.n_alpha != 0) {
        fit = fit_rig(image, o.n_alpha, config);
        report["mode"] = "fixed";
    } else {
        AlphaSelection sel = select_n_alpha(image, config);
        report["mode"] = "selected";
        report["candidates"] = ordered_json::array();
        for (std::size_t k = 0; k < sel.candidates.size(); ++k)
            report["candidates"].push_back(
                {{"n_alpha", sel.candidates[k]}, {"loss", sel.losses[k]}, {"score", sel.scores[k]}});
        fit = std::move(sel.fit);
    }

    const std::string digest = sha256_hex(dump(rig_config_to_json(config)));
    const SailRig rig = build_mapping(image, fit, digest);
    save_rig(rig, o.output);
    const Raster recon = recolor(rig);
    png::write_rgb8(fs::path(o.output) / "reconstruction.png", recon);

    report["n_alpha"] = fit.n_alpha();
    report["loss"] = rig_loss_to_json(fit.loss);
    report["bundle"] = o.output;
    if (o.json) {
        out << dump(report);
    } else {
        out << "n_alpha " << fit.n_alpha() << "  recon " << fmt(fit.loss.recon) << "  tv " << fmt(fit.loss.tv)
            << "  total " << fmt(fit.loss.total) << '\n';
        out << "bundle written to " << o.output << '\n';
    }
    return kOk;
}

int cmd_recolor(const Options& o, std::ostream& out)
{
    if (o.output.empty())
        throw InvalidArgument("recolor: --output PNG is required");
    const SailRig rig = load_rig(o.input);
    nlohmann::json edits_json;
    try {
        edits_json = nlohmann::json::parse(read_text(o.second));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("edits: ") + e.what());
    }
    const auto edits = parse_edits(edits_json);
    Raster original;
    if (!o.original.empty())
        original = read_image(o.original);
    const Raster result = recolor(rig, edits, o.original.empty() ? nullptr : &original);
    png::write_rgb8(o.output, result);
    if (o.json) {
        ordered_json j;
        j["output"] = o.output;
        j["width"] = result.width;
        j["height"] = result.height;
        j["edits"] = edits.size();
        out << dump(j);
    } else {
        out << "wrote " << o.output << '\n';
    }
    return kOk;
}

int cmd_render(const Options& o, std::ostream& out)
{
    if (o.output.empty())
        throw InvalidArgument("render: --output PNG is required");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(o.input));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("sail: ") + e.what());
    }
    const ColorSail sail = sail_from_json(j.is_object() && j.contains("sail") ? j.at("sail") : j);
    const SailImage img = render_sail(sail, o.size);
    png::write_rgba8(o.output, img.width, img.height, img.rgba);
    if (o.json)
        out << dump(ordered_json{{"output", o.output}, {"size", o.size}, {"patches", expanded_count(sail.subdivision)}});
    else
        out << "wrote " << o.output << '\n';
    return kOk;
}

int cmd_analyze(const Options& o, std::ostream& out, std::ostream& err)
{
    if (!fs::is_directory(o.input))
        throw IoError("not a directory: " + o.input);
    if (o.patches < 1)
        throw InvalidArgument("--patches must be >= 1");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(o.input))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    struct Outcome {
        bool ok = false;
        ImageAnalysis analysis;
        std::string error;
    };
    std::vector<std::future<Outcome>> jobs;
    for (std::size_t k = 0; k < files.size(); ++k) {
        jobs.push_back(std::async(std::launch::async, [&, k] {
            Outcome r;
            try {
                r.analysis = analyze_raster(png::read_rgb(files[k]), o.patches, mix_seed(o.seed, k));
                r.analysis.file = files[k].filename().string();
                r.ok = true;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            return r;
        }));
    }
    std::ostringstream csv;
    csv << analysis_csv_header() << '\n';
    int easy = 0, medium = 0, hard = 0;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const Outcome r = jobs[k].get();
        if (!r.ok) {
            err << "warning: skipping " << files[k].filename().string() << ": " << r.error << '\n';
            continue;
        }
        easy += r.analysis.easy;
        medium += r.analysis.medium;
        hard += r.analysis.hard;
        csv << analysis_csv_row(r.analysis) << '\n';
    }
    if (!o.output.empty())
        write_text(o.output, csv.str());
    if (o.json)
        out << dump(ordered_json{{"images", files.size()}, {"easy", easy}, {"medium", medium}, {"hard", hard}});
    else if (o.output.empty())
        out << csv.str();
    return kOk;
}

int cmd_metrics(const Options& o, std::ostream& out)
{
    const Raster image = read_image(o.input);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(o.second));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("sail: ") + e.what());
    }
    const ColorSail sail = sail_from_json(j.is_object() && j.contains("sail") ? j.at("sail") : j);
    const FitLoss loss = combined_loss(pixel_targets(image), sail, patchmax_histogram(image), o.lambda_kl);
    const ColorHistogram hist = build_histogram(image);
    ordered_json report;
    report["loss"] = fit_loss_to_json(loss);
    report["colorfulness"] = colorfulness(image);
    report["entropy_bits"] = histogram_entropy(hist);
    report["hardness"] = std::string(to_string(hardness_of(report["entropy_bits"].get<double>())));
    if (o.json) {
        out << dump(report);
    } else {
        out << "e_l2 " << fmt(loss.e_l2) << "  e_kl " << fmt(loss.e_kl) << "  R% (delta=10) " << fmt(loss.r_percent)
            << "  combined " << fmt(loss.combined) << '\n';
        out << "colorfulness " << fmt(report["colorfulness"].get<double>()) << "  entropy "
            << fmt(report["entropy_bits"].get<double>()) << " bits (" << report["hardness"].get<std::string>()
            << ")\n";
    }
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Color sail fitting, rigging and recoloring"};
    app.require_subcommand(1);
    Options o;

    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "RNG seed"); };
    auto add_json = [&](CLI::App* c) { c->add_flag("--json", o.json, "Print a JSON report"); };
    auto add_fit = [&](CLI::App* c) {
        c->add_option("--subdivision", o.subdivision, "Subdivision: s, a..b or a,b,c");
        c->add_option("--lambda-kl", o.lambda_kl, "KL weight");
        c->add_option("--restarts", o.restarts, "Fit restarts");
    };

    auto* fit = app.add_subcommand("fit", "Fit one sail to an image");
    fit->add_option("image", o.input, "Input PNG")->required();
    fit->add_option("-o,--output", o.output, "Write the JSON report here");
    add_fit(fit);
    add_seed(fit);
    add_json(fit);

    auto* rig = app.add_subcommand("rig", "Decompose an image into a sail rig bundle");
    rig->add_option("image", o.input, "Input PNG")->required();
    rig->add_option("-o,--output", o.output, "Bundle directory")->required();
    rig->add_option("--n-alpha", o.n_alpha, "Fixed mask count (skips selection)");
    rig->add_option("--candidates", o.candidates, "Mask counts to select from");
    rig->add_option("--penalty", o.penalty, "Per-mask selection penalty");
    rig->add_option("--alphas", o.alphas, "Directory of mask PNGs; skips mask optimization");
    add_fit(rig);
    add_seed(rig);
    add_json(rig);

    auto* rec = app.add_subcommand("recolor", "Recolor a rig bundle with edits");
    rec->add_option("bundle", o.input, "Bundle directory")->required();
    rec->add_option("edits", o.second, "Edits JSON")->required();
    rec->add_option("-o,--output", o.output, "Output PNG")->required();
    rec->add_option("--original", o.original, "Original image, used for unmapped pixels");
    add_json(rec);

    auto* ren = app.add_subcommand("render", "Render a sail as a subdivided triangle");
    ren->add_option("sail", o.input, "Sail JSON")->required();
    ren->add_option("-o,--output", o.output, "Output PNG")->required();
    ren->add_option("--size", o.size, "Image side in pixels");
    add_json(ren);

    auto* ana = app.add_subcommand("analyze", "Colorfulness and patch-entropy statistics of a PNG directory");
    ana->add_option("dir", o.input, "Image directory")->required();
    ana->add_option("-o,--output", o.output, "CSV output path");
    ana->add_option("--patches", o.patches, "Patches per image");
    add_seed(ana);
    add_json(ana);

    auto* met = app.add_subcommand("metrics", "Evaluate a sail against an image");
    met->add_option("image", o.input, "Input PNG")->required();
    met->add_option("sail", o.second, "Sail JSON")->required();
    met->add_option("--lambda-kl", o.lambda_kl, "KL weight");
    add_json(met);

    try {
        std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
        std::reverse(reversed.begin(), reversed.end());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (fit->parsed())
            return cmd_fit(o, out);
        if (rig->parsed())
            return cmd_rig(o, out);
        if (rec->parsed())
            return cmd_recolor(o, out);
        if (ren->parsed())
            return cmd_render(o, out);
        if (ana->parsed())
            return cmd_analyze(o, out, err);
        if (met->parsed())
            return cmd_metrics(o, out);
    } catch (const NumericalFailure& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
    return kInputError;
}

} // namespace colorsail::cli
