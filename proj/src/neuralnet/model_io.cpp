#include "hidescan/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace hidescan {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'H', 'S', 'M', 'O', 'D', 'E', 'L', '\0'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorCode::IoError, "malformed model file: " + why); }

}  // namespace

json to_json(const LayerSpec& l) {
  json j = {{"kind", to_string(l.kind)}, {"name", l.name}};
  switch (l.kind) {
    case LayerKind::Conv:
      j["filters"] = l.filters;
      j["groups"] = l.groups;
      [[fallthrough]];
    case LayerKind::MaxPool:
      j["kernel"] = l.kernel;
      j["stride"] = l.stride;
      j["padding"] = l.padding;
      break;
    case LayerKind::FullyConnected:
      j["outputs"] = l.filters;
      break;
    case LayerKind::LRN:
      j["window"] = l.window;
      j["k"] = l.lrn_k;
      j["alpha"] = l.lrn_alpha;
      j["beta"] = l.lrn_beta;
      break;
    case LayerKind::Dropout:
      j["rate"] = l.rate;
      break;
    default:
      break;
  }
  return j;
}

LayerSpec layer_from_json(const json& j) {
  LayerSpec l;
  l.kind = layer_kind_from_string(j.at("kind").get<std::string>());
  l.name = j.value("name", "");
  if (j.contains("kernel")) l.kernel = j.at("kernel").get<std::array<int, 2>>();
  if (j.contains("stride")) l.stride = j.at("stride").get<std::array<int, 2>>();
  if (j.contains("padding")) l.padding = j.at("padding").get<std::array<int, 4>>();
  l.filters = j.value("filters", j.value("outputs", 0));
  l.groups = j.value("groups", 1);
  l.window = j.value("window", 5);
  l.lrn_k = j.value("k", 2.0);
  l.lrn_alpha = j.value("alpha", 1e-4);
  l.lrn_beta = j.value("beta", 0.75);
  l.rate = j.value("rate", 0.0);
  return l;
}

json to_json(const NetworkSpec& spec) {
  json layers = json::array();
  for (const auto& l : spec.layers) layers.push_back(to_json(l));
  return {{"input_shape", spec.input_shape}, {"layers", layers}};
}

NetworkSpec network_from_json(const json& j) {
  NetworkSpec spec;
  spec.input_shape = j.at("input_shape").get<Shape>();
  for (const auto& l : j.at("layers")) spec.layers.push_back(layer_from_json(l));
  return spec;
}

json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},       {"learning_rate", c.learning_rate}, {"momentum", c.momentum},
          {"batch_size", c.batch_size}, {"seed", c.seed},                 {"early_stop_patience", c.early_stop_patience}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.momentum = j.value("momentum", c.momentum);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  c.early_stop_patience = j.value("early_stop_patience", c.early_stop_patience);
  return c;
}

std::vector<std::uint8_t> serialize_model(const Network<float>& net, const ModelMetadata& meta) {
  const auto weights = net.flat_parameters();
  json header = {{"format_version", kModelFormatVersion},
                 {"pipeline", meta.pipeline},
                 {"network", to_json(net.spec())},
                 {"seed", net.seed()},
                 {"train", to_json(meta.train)},
                 {"preprocessing", meta.preprocessing},
                 {"parameter_count", weights.size()}};
  const std::string text = header.dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  out.reserve(out.size() + 4 * weights.size());
  for (float w : weights) {
    const auto bits = std::bit_cast<std::uint32_t>(w);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  return out;
}

LoadedModel deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) malformed("bad magic");
  const std::uint64_t header_len = get_u64(bytes.data() + 8);
  if (header_len > bytes.size() - 16) malformed("header length exceeds file size");
  json header;
  try {
    header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(header_len));
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  const int version = header.value("format_version", -1);
  if (version != kModelFormatVersion)
    throw Error(ErrorCode::UnsupportedVersion, "model format version " + std::to_string(version) +
                                                   " (this build reads version " +
                                                   std::to_string(kModelFormatVersion) + ")");
  NetworkSpec spec = network_from_json(header.at("network"));
  Network<float> net(spec, header.at("seed").get<std::uint64_t>());
  const std::size_t count = net.parameter_count();
  const std::size_t offset = 16 + header_len;
  if (bytes.size() - offset != 4 * count)
    malformed("weight blob holds " + std::to_string((bytes.size() - offset) / 4) + " values, expected " +
              std::to_string(count));
  std::vector<float> weights(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint8_t* p = bytes.data() + offset + 4 * i;
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    weights[i] = std::bit_cast<float>(bits);
  }
  net.set_flat_parameters(weights);
  ModelMetadata meta;
  meta.pipeline = header.value("pipeline", "");
  meta.preprocessing = header.value("preprocessing", json::object());
  meta.train = train_config_from_json(header.value("train", json::object()));
  return {std::move(net), std::move(meta)};
}

void save_model(const std::filesystem::path& path, const Network<float>& net, const ModelMetadata& meta) {
  const auto bytes = serialize_model(net, meta);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace hidescan
