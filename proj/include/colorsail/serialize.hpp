#pragma once

#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "colorsail/alpha_rig.hpp"
#include "colorsail/fit.hpp"
#include "colorsail/metrics.hpp"
#include "colorsail/sail.hpp"

namespace colorsail {

using ordered_json = nlohmann::ordered_json;

/// {"vertices": [[r,g,b] x3], "focus": [pu, pv], "wind": w, "subdivision": s}.
/// Doubles are written in shortest round-trip form, so parse(dump(x)) == x.
ordered_json sail_to_json(const ColorSail& sail);

/// Parses and validates; InvalidArgument messages name the offending field.
ColorSail sail_from_json(const nlohmann::json& j);

ordered_json fit_loss_to_json(const FitLoss& loss);
ordered_json fit_config_to_json(const FitConfig& config);
ordered_json rig_config_to_json(const RigConfig& config);
ordered_json rig_loss_to_json(const RigLoss& loss);

/// Two-space indented dump with a trailing newline.
std::string dump(const ordered_json& j);

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(const std::string& text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace colorsail
