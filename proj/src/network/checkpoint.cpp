#include "pinnfp/network/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pinnfp/error.hpp"
#include "pinnfp/io/csv.hpp"

namespace pinnfp::network {

using nlohmann::json;

json spec_to_json(const NetworkSpec& spec) {
  return json{{"input_width", spec.input_width},
              {"hidden", spec.hidden_layers},
              {"output_width", spec.output_width},
              {"activation", std::string(to_string(spec.activation))},
              {"initializer", std::string(to_string(spec.initializer))},
              {"seed", spec.seed}};
}

NetworkSpec spec_from_json(const json& j) {
  NetworkSpec spec;
  try {
    if (j.contains("input_width")) spec.input_width = j.at("input_width").get<int>();
    if (j.contains("hidden")) spec.hidden_layers = j.at("hidden").get<std::vector<int>>();
    if (j.contains("arch")) spec.hidden_layers = parse_arch(j.at("arch").get<std::string>());
    if (j.contains("output_width")) spec.output_width = j.at("output_width").get<int>();
    if (j.contains("activation")) spec.activation = parse_activation(j.at("activation").get<std::string>());
    if (j.contains("initializer")) spec.initializer = parse_initializer(j.at("initializer").get<std::string>());
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid network specification: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string encode_f64_le(std::span<const double> values) {
  std::string out(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) out[i * 8 + static_cast<std::size_t>(b)] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  return out;
}

std::vector<double> decode_f64_le(std::string_view bytes) {
  if (bytes.size() % 8 != 0) throw ParseError("binary parameter file length is not a multiple of 8", 0);
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + static_cast<std::size_t>(b)]))
              << (8 * b);
    out[i] = std::bit_cast<double>(bits);
  }
  return out;
}

namespace {

std::filesystem::path stem_of(const std::filesystem::path& p) {
  auto ext = p.extension();
  if (ext == ".bin" || ext == ".json") return p.parent_path() / p.stem();
  return p;
}

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return std::filesystem::path(stem.string() + suffix);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& stem_in, const NetworkSpec& spec, const ParameterVector& params,
                     std::optional<long> epoch, bool force) {
  const auto stem = stem_of(stem_in);
  if (params.size() != ParameterLayout(spec).size()) throw ConfigError("checkpoint parameters do not match spec");
  io::write_file_guarded(with_suffix(stem, ".bin"), encode_f64_le(params.values()), force);
  json layers = json::array();
  for (const auto& l : params.layout().layers())
    layers.push_back({{"fan_in", l.fan_in},
                      {"fan_out", l.fan_out},
                      {"weight_offset", l.weight_offset},
                      {"bias_offset", l.bias_offset}});
  json meta{{"format", "float64-little-endian"},
            {"count", params.size()},
            {"weight_order", "column-major (fan_out x fan_in)"},
            {"spec", spec_to_json(spec)},
            {"seed", spec.seed},
            {"layout", layers}};
  if (epoch) meta["epoch"] = *epoch;
  io::write_file_guarded(with_suffix(stem, ".json"), meta.dump(2) + "\n", force);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const auto stem = stem_of(path);
  const auto json_path = with_suffix(stem, ".json");
  const auto bin_path = with_suffix(stem, ".bin");
  std::ifstream js(json_path);
  if (!js) throw ConfigError("missing checkpoint metadata " + json_path.string());
  json meta;
  try {
    js >> meta;
  } catch (const json::exception& e) {
    throw ConfigError("malformed checkpoint metadata " + json_path.string() + ": " + e.what());
  }
  Checkpoint cp;
  cp.spec = spec_from_json(meta.at("spec"));
  if (meta.contains("epoch")) cp.epoch = meta.at("epoch").get<long>();
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw ConfigError("missing checkpoint data " + bin_path.string());
  std::stringstream ss;
  ss << bin.rdbuf();
  cp.params = ParameterVector(ParameterLayout(cp.spec), decode_f64_le(ss.str()));
  return cp;
}

}  // namespace pinnfp::network
