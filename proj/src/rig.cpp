#include "colorsail/rig.hpp"

#include <cmath>
#include <limits>

#include "colorsail/kernels.hpp"
#include "colorsail/png_io.hpp"
#include "colorsail/serialize.hpp"

namespace colorsail {

std::string image_digest(const Raster& image)
{
    const auto bytes = to_rgb8(image);
    return sha256_hex(bytes);
}

SailRig build_mapping(const Raster& image, const RigFit& fit, const std::string& fit_config_digest,
                      MappingStrategy strategy)
{
    if (strategy != MappingStrategy::nearest_color)
        throw InvalidArgument("unsupported mapping strategy");
    if (image.empty())
        throw InvalidArgument("build_mapping: empty image");
    if (fit.sails.empty())
        throw InvalidArgument("build_mapping: fit has no sails");

    const auto planes = upsample_alphas(fit, image.width, image.height);
    const kernels::ColorPlanes pixels(image.pixels);

    SailRig rig;
    rig.width = image.width;
    rig.height = image.height;
    rig.image_sha256 = image_digest(image);
    rig.fit_config_digest = fit_config_digest;
    std::vector<double> d2(image.size());
    std::vector<std::uint32_t> nearest(image.size());
    for (std::size_t i = 0; i < fit.sails.size(); ++i) {
        RigLayer layer;
        layer.sail = fit.sails[i];
        layer.alpha.resize(image.size());
        for (std::size_t p = 0; p < image.size(); ++p)
            layer.alpha[p] = quantize8(planes[i].values[p]);
        const DecodedSail decoded = decode(layer.sail, true, true);
        kernels::nearest_colors(pixels, decoded.colors, nearest, d2);
        layer.index.assign(nearest.begin(), nearest.end());
        rig.layers.push_back(std::move(layer));
    }
    return rig;
}

namespace {

std::string edit_field(std::size_t k, const std::string& name) { return "edits[" + std::to_string(k) + "]." + name; }

double edit_number(const nlohmann::json& j, const std::string& field)
{
    if (!j.is_number())
        throw InvalidArgument(field + ": must be a number");
    return j.get<double>();
}

Rgb edit_color(const nlohmann::json& j, const std::string& field)
{
    if (!j.is_array() || j.size() != 3)
        throw InvalidArgument(field + ": must be [r, g, b]");
    Rgb c{};
    for (std::size_t ch = 0; ch < 3; ++ch) {
        c[ch] = edit_number(j[ch], field);
        if (!(c[ch] >= 0.0 && c[ch] <= 1.0))
            throw InvalidArgument(field + ": channels must lie in [0, 1]");
    }
    return c;
}

} // namespace

std::vector<EditDelta> parse_edits(const nlohmann::json& j)
{
    if (!j.is_array())
        throw InvalidArgument("edits: must be a JSON array");
    std::vector<EditDelta> edits;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto& e = j[k];
        if (!e.is_object())
            throw InvalidArgument(edit_field(k, "") + ": must be an object");
        for (const auto& [key, value] : e.items())
            if (key != "sail" && key != "set")
                throw InvalidArgument(edit_field(k, key) + ": unknown field");
        if (!e.contains("sail") || !e.at("sail").is_number_integer())
            throw InvalidArgument(edit_field(k, "sail") + ": must be an integer");
        EditDelta d;
        d.sail = e.at("sail").get<int>();
        if (d.sail < 0)
            throw InvalidArgument(edit_field(k, "sail") + ": must be >= 0");
        if (!e.contains("set") || !e.at("set").is_object())
            throw InvalidArgument(edit_field(k, "set") + ": must be an object");
        for (const auto& [key, value] : e.at("set").items()) {
            const std::string field = edit_field(k, "set." + key);
            if (key == "vertex0" || key == "vertex1" || key == "vertex2") {
                d.vertex[static_cast<std::size_t>(key.back() - '0')] = edit_color(value, field);
            } else if (key == "focus") {
                if (!value.is_array() || value.size() != 2)
                    throw InvalidArgument(field + ": must be [pu, pv]");
                const double pu = edit_number(value[0], field);
                const double pv = edit_number(value[1], field);
                if (!(pu >= 0.0 && pv >= 0.0 && pu + pv <= 1.0 + 1e-12))
                    throw InvalidArgument(field + ": must lie in the barycentric simplex");
                d.focus = std::make_pair(pu, pv);
            } else if (key == "wind") {
                const double w = edit_number(value, field);
                if (!(w >= -1.0 && w <= 1.0))
                    throw InvalidArgument(field + ": must lie in [-1, 1]");
                d.wind = w;
            } else if (key == "subdivision") {
                if (!value.is_number_integer())
                    throw InvalidArgument(field + ": must be an integer");
                const int s = value.get<int>();
                if (s < 2 || s > 255)
                    throw InvalidArgument(field + ": must lie in [2, 255]");
                d.subdivision = s;
            } else {
                throw InvalidArgument(field + ": unknown field");
            }
        }
        edits.push_back(d);
    }
    return edits;
}

nlohmann::ordered_json edits_to_json(const std::vector<EditDelta>& edits)
{
    auto out = nlohmann::ordered_json::array();
    for (const auto& d : edits) {
        nlohmann::ordered_json set = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < 3; ++k)
            if (d.vertex[k])
                set["vertex" + std::to_string(k)] = {(*d.vertex[k])[0], (*d.vertex[k])[1], (*d.vertex[k])[2]};
        if (d.focus)
            set["focus"] = {d.focus->first, d.focus->second};
        if (d.wind)
            set["wind"] = *d.wind;
        if (d.subdivision)
            set["subdivision"] = *d.subdivision;
        out.push_back({{"sail", d.sail}, {"set", set}});
    }
    return out;
}

SailRig apply_edits(const SailRig& rig, const std::vector<EditDelta>& edits)
{
    SailRig out = rig;
    for (std::size_t k = 0; k < edits.size(); ++k) {
        const EditDelta& d = edits[k];
        if (d.sail < 0 || static_cast<std::size_t>(d.sail) >= out.layers.size())
            throw InvalidArgument(edit_field(k, "sail") + ": no sail with index " + std::to_string(d.sail));
        ColorSail& sail = out.layers[d.sail].sail;
        for (std::size_t v = 0; v < 3; ++v)
            if (d.vertex[v])
                sail.vertices[v] = *d.vertex[v];
        if (d.focus) {
            sail.focus_u = d.focus->first;
            sail.focus_v = d.focus->second;
        }
        if (d.wind)
            sail.wind = *d.wind;
        try {
            sail.validate();
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(edit_field(k, "set") + ": " + e.what());
        }
        if (d.subdivision && *d.subdivision != sail.subdivision)
            out = remap_subdivision(out, static_cast<std::size_t>(d.sail), *d.subdivision);
    }
    return out;
}

Raster recolor(const SailRig& rig, const std::vector<EditDelta>& edits, const Raster* original)
{
    const SailRig edited = edits.empty() ? rig : apply_edits(rig, edits);
    const std::size_t count = edited.pixel_count();
    if (original && (original->width != edited.width || original->height != edited.height))
        throw InvalidArgument("original image dimensions differ from the rig");

    kernels::ColorPlanes out(count);
    kernels::ColorPlanes layer(count);
    std::vector<double> weight(count);
    for (std::size_t i = 0; i < edited.layers.size(); ++i) {
        const RigLayer& l = edited.layers[i];
        const DecodedSail decoded = decode(l.sail, true, true);
        for (std::size_t p = 0; p < count; ++p) {
            weight[p] = alpha_value(l.alpha[p]);
            const std::uint16_t idx = l.index[p];
            if (idx == kUnmapped) {
                if (!original)
                    throw InvalidArgument("sail " + std::to_string(i) + " has unmapped pixels; the original image is required");
                layer.set(p, original->pixels[p]);
            } else {
                if (idx >= decoded.colors.size())
                    throw InvalidArgument("sail " + std::to_string(i) + " index " + std::to_string(idx) +
                                          " exceeds its grid size");
                layer.set(p, decoded.colors[idx]);
            }
        }
        kernels::accumulate_weighted(weight, layer, out);
    }
    Raster img(edited.width, edited.height);
    for (std::size_t p = 0; p < count; ++p)
        img.pixels[p] = out.get(p);
    return img;
}

std::vector<std::uint16_t> subdivision_remap_table(int old_s, int new_s)
{
    if (old_s > 255 || new_s > 255)
        throw InvalidSubdivision("subdivision must be <= 255");
    const auto from = enumerate_grid(old_s, true);
    const auto to = enumerate_grid(new_s, true);
    std::vector<std::uint16_t> table(from.size());
    for (std::size_t a = 0; a < from.size(); ++a) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < to.size(); ++b) {
            const double d0 = from[a].bary[0] - to[b].bary[0];
            const double d1 = from[a].bary[1] - to[b].bary[1];
            const double d2 = from[a].bary[2] - to[b].bary[2];
            const double d = (d0 * d0 + d1 * d1) + d2 * d2;
            if (d < best_d) {
                best_d = d;
                best = b;
            }
        }
        table[a] = static_cast<std::uint16_t>(best);
    }
    return table;
}

SailRig remap_subdivision(const SailRig& rig, std::size_t sail_index, int new_s)
{
    if (sail_index >= rig.layers.size())
        throw InvalidArgument("no sail with index " + std::to_string(sail_index));
    if (new_s < 2)
        throw InvalidSubdivision("subdivision must be >= 2");
    SailRig out = rig;
    RigLayer& layer = out.layers[sail_index];
    const auto table = subdivision_remap_table(layer.sail.subdivision, new_s);
    for (auto& idx : layer.index) {
        if (idx == kUnmapped)
            continue;
        if (idx >= table.size())
            throw InvalidArgument("sail " + std::to_string(sail_index) + " has an index outside its grid");
        idx = table[idx];
    }
    layer.sail.subdivision = new_s;
    return out;
}

nlohmann::ordered_json rig_manifest(const SailRig& rig)
{
    ordered_json j;
    j["version"] = rig.version;
    j["width"] = rig.width;
    j["height"] = rig.height;
    j["image_sha256"] = rig.image_sha256;
    j["sails"] = ordered_json::array();
    for (std::size_t i = 0; i < rig.layers.size(); ++i) {
        ordered_json s = sail_to_json(rig.layers[i].sail);
        s["alpha_file"] = alpha_file_name(i);
        s["index_file"] = index_file_name(i);
        j["sails"].push_back(std::move(s));
    }
    j["fit_config_digest"] = rig.fit_config_digest;
    return j;
}

void save_rig(const SailRig& rig, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (std::size_t i = 0; i < rig.layers.size(); ++i) {
        const auto& l = rig.layers[i];
        if (l.alpha.size() != rig.pixel_count() || l.index.size() != rig.pixel_count())
            throw InvalidArgument("sail " + std::to_string(i) + ": mask size differs from the rig dimensions");
        png::write_gray8(dir / alpha_file_name(i), rig.width, rig.height, l.alpha);
        png::write_gray16(dir / index_file_name(i), rig.width, rig.height, l.index);
    }
    write_text(dir / "manifest.json", dump(rig_manifest(rig)));
}

namespace {

const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& where)
{
    if (!j.contains(key))
        throw BundleError(BundleError::Kind::schema, where + ": missing field '" + key + "'");
    return j.at(key);
}

png::Image load_layer_png(const std::filesystem::path& path, std::size_t i, int bit_depth, const SailRig& rig)
{
    if (!std::filesystem::exists(path))
        throw BundleError(BundleError::Kind::missing_file,
                          "sail " + std::to_string(i) + ": missing file " + path.filename().string());
    png::Image img;
    try {
        img = png::read(path);
    } catch (const IoError& e) {
        throw BundleError(BundleError::Kind::schema, "sail " + std::to_string(i) + ": " + e.what());
    }
    if (img.width != rig.width || img.height != rig.height)
        throw BundleError(BundleError::Kind::dimension_mismatch,
                          "sail " + std::to_string(i) + ": " + path.filename().string() + " is " +
                              std::to_string(img.width) + "x" + std::to_string(img.height) + ", expected " +
                              std::to_string(rig.width) + "x" + std::to_string(rig.height));
    if (img.channels != 1 || img.bit_depth != bit_depth)
        throw BundleError(BundleError::Kind::schema, "sail " + std::to_string(i) + ": " + path.filename().string() +
                                                         " must be " + std::to_string(bit_depth) +
                                                         "-bit grayscale");
    return img;
}

std::string file_name_field(const nlohmann::json& s, const char* key, const std::string& where)
{
    const auto& v = require(s, key, where);
    if (!v.is_string())
        throw BundleError(BundleError::Kind::schema, where + "." + key + ": must be a string");
    const std::string name = v.get<std::string>();
    if (name.empty() || std::filesystem::path(name).has_parent_path())
        throw BundleError(BundleError::Kind::schema, where + "." + key + ": must be a plain file name");
    return name;
}

} // namespace

SailRig load_rig(const std::filesystem::path& dir)
{
    const auto manifest_path = dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path))
        throw BundleError(BundleError::Kind::missing_file, "missing file " + manifest_path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw BundleError(BundleError::Kind::schema, std::string("manifest.json: ") + e.what());
    }
    if (!j.is_object())
        throw BundleError(BundleError::Kind::schema, "manifest.json: must be an object");
    const auto& version = require(j, "version", "manifest");
    if (!version.is_number_integer() || version.get<int>() != kRigVersion)
        throw BundleError(BundleError::Kind::version,
                          "manifest: unsupported version " + version.dump() + " (expected " +
                              std::to_string(kRigVersion) + ")");

    SailRig rig;
    const auto& w = require(j, "width", "manifest");
    const auto& h = require(j, "height", "manifest");
    if (!w.is_number_integer() || !h.is_number_integer() || w.get<int>() < 1 || h.get<int>() < 1)
        throw BundleError(BundleError::Kind::schema, "manifest: width and height must be positive integers");
    rig.width = w.get<int>();
    rig.height = h.get<int>();
    const auto& sha = require(j, "image_sha256", "manifest");
    const auto& digest = require(j, "fit_config_digest", "manifest");
    if (!sha.is_string() || !digest.is_string())
        throw BundleError(BundleError::Kind::schema, "manifest: image_sha256 and fit_config_digest must be strings");
    rig.image_sha256 = sha.get<std::string>();
    rig.fit_config_digest = digest.get<std::string>();

    const auto& sails = require(j, "sails", "manifest");
    if (!sails.is_array() || sails.empty())
        throw BundleError(BundleError::Kind::schema, "manifest: sails must be a nonempty array");
    for (std::size_t i = 0; i < sails.size(); ++i) {
        const std::string where = "sails[" + std::to_string(i) + "]";
        RigLayer layer;
        try {
            layer.sail = sail_from_json(sails[i]);
        } catch (const InvalidArgument& e) {
            throw BundleError(BundleError::Kind::schema, where + ": " + e.what());
        }
        const auto alpha = load_layer_png(dir / file_name_field(sails[i], "alpha_file", where), i, 8, rig);
        const auto index = load_layer_png(dir / file_name_field(sails[i], "index_file", where), i, 16, rig);
        layer.alpha.assign(alpha.samples.begin(), alpha.samples.end());
        layer.index.assign(index.samples.begin(), index.samples.end());
        const std::size_t grid = expanded_count(layer.sail.subdivision);
        for (auto idx : layer.index)
            if (idx != kUnmapped && idx >= grid)
                throw BundleError(BundleError::Kind::schema,
                                  where + ": index " + std::to_string(idx) + " outside the grid of s=" +
                                      std::to_string(layer.sail.subdivision));
        rig.layers.push_back(std::move(layer));
    }
    return rig;
}

} // namespace colorsail
