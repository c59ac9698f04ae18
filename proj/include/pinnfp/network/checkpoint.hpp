#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>

#include "pinnfp/network/spec.hpp"

namespace pinnfp::network {

nlohmann::json spec_to_json(const NetworkSpec& spec);
/// Accepts "hidden": [..] or "arch": "4x50"; missing fields keep NetworkSpec defaults.
NetworkSpec spec_from_json(const nlohmann::json& j);

struct Checkpoint {
  NetworkSpec spec;
  ParameterVector params;
  std::optional<long> epoch;
};

/// Writes `<stem>.bin` (little-endian float64, layout order) and `<stem>.json` (spec, layout, seed).
/// Without `force`, an existing file with different content is left alone and ConfigError is thrown.
void save_checkpoint(const std::filesystem::path& stem, const NetworkSpec& spec, const ParameterVector& params,
                     std::optional<long> epoch = std::nullopt, bool force = true);
/// Accepts the stem or either file of the pair.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Raw little-endian float64 encoding, independent of host byte order.
std::string encode_f64_le(std::span<const double> values);
std::vector<double> decode_f64_le(std::string_view bytes);

}  // namespace pinnfp::network
