#include "colorsail/serialize.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>

#include "colorsail/error.hpp"

namespace colorsail {

namespace {

double number_field(const nlohmann::json& j, const std::string& name)
{
    if (!j.is_number())
        throw InvalidArgument("field '" + name + "' must be a number");
    return j.get<double>();
}

Rgb rgb_field(const nlohmann::json& j, const std::string& name)
{
    if (!j.is_array() || j.size() != 3)
        throw InvalidArgument("field '" + name + "' must be an array of 3 numbers");
    Rgb c{};
    for (std::size_t k = 0; k < 3; ++k)
        c[k] = number_field(j[k], name);
    return c;
}

} // namespace

ordered_json sail_to_json(const ColorSail& sail)
{
    ordered_json j;
    j["vertices"] = ordered_json::array();
    for (const auto& v : sail.vertices)
        j["vertices"].push_back({v[0], v[1], v[2]});
    j["focus"] = {sail.focus_u, sail.focus_v};
    j["wind"] = sail.wind;
    j["subdivision"] = sail.subdivision;
    return j;
}

ColorSail sail_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw InvalidArgument("sail must be a JSON object");
    for (const char* key : {"vertices", "focus", "wind", "subdivision"})
        if (!j.contains(key))
            throw InvalidArgument(std::string("missing field '") + key + "'");

    ColorSail sail;
    const auto& verts = j.at("vertices");
    if (!verts.is_array() || verts.size() != 3)
        throw InvalidArgument("field 'vertices' must hold 3 colors");
    for (std::size_t k = 0; k < 3; ++k)
        sail.vertices[k] = rgb_field(verts[k], "vertices");
    const auto& focus = j.at("focus");
    if (!focus.is_array() || focus.size() != 2)
        throw InvalidArgument("field 'focus' must be [pu, pv]");
    sail.focus_u = number_field(focus[0], "focus");
    sail.focus_v = number_field(focus[1], "focus");
    sail.wind = number_field(j.at("wind"), "wind");
    if (!j.at("subdivision").is_number_integer())
        throw InvalidArgument("field 'subdivision' must be an integer");
    sail.subdivision = j.at("subdivision").get<int>();

    try {
        sail.validate();
    } catch (const InvalidSubdivision& e) {
        throw InvalidSubdivision(std::string("field 'subdivision': ") + e.what());
    } catch (const InvalidArgument& e) {
        const std::string msg = e.what();
        std::string field = "vertices";
        if (msg.find("focus") != std::string::npos)
            field = "focus";
        else if (msg.find("wind") != std::string::npos)
            field = "wind";
        throw InvalidArgument("field '" + field + "': " + msg);
    }
    return sail;
}

ordered_json fit_loss_to_json(const FitLoss& loss)
{
    ordered_json j;
    j["e_l2"] = loss.e_l2;
    j["e_kl"] = loss.e_kl;
    j["r_percent"] = loss.r_percent;
    j["e_percent"] = loss.e_percent();
    j["lambda"] = loss.lambda;
    j["combined"] = loss.combined;
    return j;
}

ordered_json fit_config_to_json(const FitConfig& c)
{
    ordered_json j;
    j["subdivision"] = c.subdivision;
    j["sweep"] = c.sweep;
    j["lambda_kl"] = c.lambda_kl;
    j["learning_rate"] = c.adam.learning_rate;
    j["beta1"] = c.adam.beta1;
    j["beta2"] = c.adam.beta2;
    j["adam_epsilon"] = c.adam.epsilon;
    j["max_iterations"] = c.max_iterations;
    j["restarts"] = c.restarts;
    j["extremal_start"] = c.extremal_start;
    j["tolerance"] = c.tolerance;
    j["tolerance_window"] = c.tolerance_window;
    j["complexity_weight"] = c.complexity_weight;
    j["bin_target"] = c.bin_target == BinTarget::mean ? "mean" : "center";
    j["seed"] = c.seed;
    return j;
}

ordered_json rig_config_to_json(const RigConfig& c)
{
    ordered_json j;
    j["tau"] = c.tau;
    j["tv_weight"] = c.tv_weight;
    j["logit_learning_rate"] = c.logit_adam.learning_rate;
    j["epochs"] = c.epochs;
    j["steps_per_epoch"] = c.steps_per_epoch;
    j["refit_iterations"] = c.refit_iterations;
    j["init_logit"] = c.init_logit;
    j["max_side"] = c.max_side;
    j["candidates"] = c.candidates;
    j["alpha_penalty"] = c.alpha_penalty;
    j["selection_units"] = c.selection_units == SelectionUnits::mse_255 ? "mse_255" : "mean_distance_255";
    j["seed"] = c.seed;
    j["sail_fit"] = fit_config_to_json(c.sail_fit);
    return j;
}

ordered_json rig_loss_to_json(const RigLoss& loss)
{
    ordered_json j;
    j["recon"] = loss.recon;
    j["tv"] = loss.tv;
    j["total"] = loss.total;
    j["mse"] = loss.mse;
    return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string sha256_hex(std::span<const unsigned char> bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string sha256_hex(const std::string& text)
{
    return sha256_hex(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
    if (!out)
        throw IoError("failed writing " + path.string());
}

} // namespace colorsail
