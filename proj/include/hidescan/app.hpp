#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hidescan/canny.hpp"
#include "hidescan/dataset.hpp"
#include "hidescan/features.hpp"
#include "hidescan/synth.hpp"
#include "hidescan/train.hpp"

namespace hidescan::app {

struct PreprocessConfig {
  CannyParams canny;  // [0.5, 0.9], sigma sqrt(2)
  BlockGrid grid;     // 5 x 5
  int ann_resolution = 50;
  bool normalize = true;
};

struct ModelConfig {
  int hidden = 50;
  int cnn_resolution = 50;
};

struct EvalConfig {
  std::string mode = "split";  // split | kfold
  int k = 10;
  int ratio = 0;  // 0 keeps the whole dataset, 1..3 builds a defective:non-defective subset
  BrightnessFilter brightness = BrightnessFilter::All;
  bool stratified = false;
};

struct SynthConfig {
  SynthParams params;
  int n_defective = 250;
  int n_nondefective = 250;
};

struct RunConfig {
  std::string pipeline = "ann";  // ann | cnn
  std::uint64_t seed = 1897;
  int threads = 1;
  std::string data;
  SynthConfig synth;
  PreprocessConfig preprocess;
  ModelConfig model;
  TrainConfig train;
  EvalConfig eval;
  std::string out = "out";
  bool keep_models = false;
  bool verbose = false;
};

/// Full default document for a pipeline. Both use lr 0.01; the ANN trains in batches of 32
/// with early stopping, the CNN in batches of 16 over a fixed epoch budget.
nlohmann::json default_config_json(const std::string& pipeline);

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

/// defaults(pipeline) <- file <- overrides, by JSON merge patch. Throws ConfigError.
RunConfig resolve_config(const std::string& default_pipeline, const nlohmann::json& file,
                         const nlohmann::json& overrides);

/// Sub-seeds derived from the run seed; logged in run.json.
struct SeedPlan {
  std::uint64_t split, folds, subset, init, shuffle, synth;
  static SeedPlan from(std::uint64_t seed);
  nlohmann::json to_json() const;
};

// Pipelines -----------------------------------------------------------------------------------

/// gray -> resize -> Canny -> block frequencies.
FeatureVector ann_features(const Image& img, const PreprocessConfig& pre);

/// RGB resized to res x res, scaled to [-0.5, 0.5], HWC order.
std::vector<float> cnn_input(const Image& img, int resolution);

Dataset<float> load_ann_dataset(const DatasetManifest& manifest, const std::filesystem::path& root,
                                const PreprocessConfig& pre);
Dataset<float> load_cnn_dataset(const DatasetManifest& manifest, const std::filesystem::path& root, int resolution);

/// Dataset selection shared by the training commands: optional brightness categorization and ratio subset.
DatasetManifest select_samples(const RunConfig& cfg, const std::filesystem::path& root);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Entry point behind the `hidescan` executable. Exit codes: 0 ok, 1 usage/config,
/// 2 data, 3 numeric failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace hidescan::app
