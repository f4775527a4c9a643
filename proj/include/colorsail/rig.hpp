#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "colorsail/alpha_rig.hpp"
#include "colorsail/error.hpp"
#include "colorsail/raster.hpp"
#include "colorsail/sail.hpp"

namespace colorsail {

inline constexpr int kRigVersion = 1;
/// Index-map value for pixels without a sail color.
inline constexpr std::uint16_t kUnmapped = 65535;

enum class MappingStrategy { nearest_color };

struct RigLayer {
    ColorSail sail;
    std::vector<std::uint8_t> alpha;    // row-major, alpha * 255 rounded half up
    std::vector<std::uint16_t> index;   // canonical grid index into the expanded set, or kUnmapped

    bool operator==(const RigLayer&) const = default;
};

struct SailRig {
    int version = kRigVersion;
    int width = 0;
    int height = 0;
    std::vector<RigLayer> layers;
    std::string image_sha256;
    std::string fit_config_digest;

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool operator==(const SailRig&) const = default;
};

/// Quantized alpha in [0,1].
inline double alpha_value(std::uint8_t a) { return a / 255.0; }

/// sha256 of the 8-bit RGB bytes of the image.
std::string image_digest(const Raster& image);

/// Freezes, per sail and pixel, the nearest clamped decoded color to the original
/// pixel (ties to the lowest index). Alphas are resampled to the image size when
/// the fit ran at a lower resolution.
SailRig build_mapping(const Raster& image, const RigFit& fit, const std::string& fit_config_digest,
                      MappingStrategy strategy = MappingStrategy::nearest_color);

/// Per-sail replacement of any subset of parameters.
struct EditDelta {
    int sail = 0;
    std::array<std::optional<Rgb>, 3> vertex;
    std::optional<std::pair<double, double>> focus;
    std::optional<double> wind;
    std::optional<int> subdivision;
};

/// Parses the edits list: [{"sail": i, "set": {"vertex0": [r,g,b], "focus": [pu,pv], "wind": w, "subdivision": s}}].
/// InvalidArgument messages name the offending field, e.g. "edits[0].set.wind".
std::vector<EditDelta> parse_edits(const nlohmann::json& j);
nlohmann::ordered_json edits_to_json(const std::vector<EditDelta>& edits);

/// Applies edits in order; a subdivision change remaps that sail's indices.
SailRig apply_edits(const SailRig& rig, const std::vector<EditDelta>& edits);

/// Blends each sail's frozen colors by the stored alphas. Unmapped pixels take the
/// pixel of `original`; without it they throw InvalidArgument.
Raster recolor(const SailRig& rig, const std::vector<EditDelta>& edits = {}, const Raster* original = nullptr);

/// Old-index to new-index table: each old grid point snaps to the nearest new grid
/// point in barycentric space (ties to the lowest index).
std::vector<std::uint16_t> subdivision_remap_table(int old_s, int new_s);
SailRig remap_subdivision(const SailRig& rig, std::size_t sail_index, int new_s);

/// Raised by load_rig; `kind` tells version, missing-file and dimension problems apart.
class BundleError : public IoError {
public:
    enum class Kind { version, missing_file, dimension_mismatch, schema };

    BundleError(Kind kind, const std::string& what) : IoError(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline std::string alpha_file_name(std::size_t i) { return "alpha_" + std::to_string(i) + ".png"; }
inline std::string index_file_name(std::size_t i) { return "index_" + std::to_string(i) + ".png"; }

nlohmann::ordered_json rig_manifest(const SailRig& rig);
/// Writes manifest.json, alpha_<i>.png (8-bit gray) and index_<i>.png (16-bit gray) into `dir`.
void save_rig(const SailRig& rig, const std::filesystem::path& dir);
SailRig load_rig(const std::filesystem::path& dir);

} // namespace colorsail
