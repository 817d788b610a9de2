#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "hidescan/network.hpp"
#include "hidescan/train.hpp"

namespace hidescan {

/// Container layout: 8-byte magic "HSMODEL\0", little-endian uint64 header length, UTF-8 JSON
/// header, then every parameter as little-endian IEEE-754 float32 in layer order.
inline constexpr int kModelFormatVersion = 1;

struct ModelMetadata {
  std::string pipeline;              // "ann" or "cnn"
  nlohmann::json preprocessing = nlohmann::json::object();
  TrainConfig train;
};

nlohmann::json to_json(const LayerSpec& layer);
LayerSpec layer_from_json(const nlohmann::json& j);
nlohmann::json to_json(const NetworkSpec& spec);
NetworkSpec network_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

std::vector<std::uint8_t> serialize_model(const Network<float>& net, const ModelMetadata& meta);

struct LoadedModel {
  Network<float> network;
  ModelMetadata meta;
};

/// Throws UnsupportedVersion for unknown format versions and IoError for malformed files.
LoadedModel deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const Network<float>& net, const ModelMetadata& meta);
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace hidescan
