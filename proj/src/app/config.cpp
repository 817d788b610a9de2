#include <cmath>

#include "hidescan/app.hpp"
#include "hidescan/error.hpp"
#include "hidescan/model_io.hpp"
#include "hidescan/random.hpp"

namespace hidescan::app {

using nlohmann::json;

json default_config_json(const std::string& pipeline) {
  if (pipeline != "ann" && pipeline != "cnn")
    throw Error(ErrorCode::ConfigError, "pipeline must be 'ann' or 'cnn', got '" + pipeline + "'");
  const bool ann = pipeline == "ann";
  const SynthParams synth;
  return {
      {"pipeline", pipeline},
      {"seed", 1897},
      {"threads", 1},
      {"data", ""},
      {"out", "out"},
      {"keep_models", false},
      {"verbose", false},
      {"synth",
       {{"size", synth.size},
        {"brightness", "bright"},
        {"grain_scale", synth.grain_scale},
        {"defect_count", synth.defect_count},
        {"defect_radius", synth.defect_radius},
        {"defect_contrast", synth.defect_contrast},
        {"n_defective", 250},
        {"n_nondefective", 250}}},
      {"preprocess",
       {{"canny_low", 0.5},
        {"canny_high", 0.9},
        {"canny_sigma", std::sqrt(2.0)},
        {"grid_rows", 5},
        {"grid_cols", 5},
        {"ann_resolution", 50},
        {"normalize", true}}},
      {"model", {{"hidden", 50}, {"cnn_resolution", 50}}},
      {"train",
       {{"epochs", ann ? 1000 : 100},
        {"learning_rate", 0.01},
        {"momentum", 0.9},
        {"batch_size", ann ? 32 : 16},
        {"early_stop_patience", ann ? 50 : 0}}},
      {"eval", {{"mode", ann ? "split" : "kfold"}, {"k", 10}, {"ratio", 0}, {"brightness", "all"}, {"stratified", false}}},
  };
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    c.pipeline = j.at("pipeline").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.threads = j.at("threads").get<int>();
    c.data = j.at("data").get<std::string>();
    c.out = j.at("out").get<std::string>();
    c.keep_models = j.at("keep_models").get<bool>();
    c.verbose = j.at("verbose").get<bool>();

    const json& s = j.at("synth");
    c.synth.params.size = s.at("size").get<int>();
    const std::string b = s.at("brightness").get<std::string>();
    if (b != "bright" && b != "dark") throw Error(ErrorCode::ConfigError, "synth.brightness must be bright or dark");
    c.synth.params.base_brightness = b == "bright" ? BrightnessClass::Bright : BrightnessClass::Dark;
    c.synth.params.grain_scale = s.at("grain_scale").get<double>();
    c.synth.params.defect_count = s.at("defect_count").get<int>();
    c.synth.params.defect_radius = s.at("defect_radius").get<std::array<double, 2>>();
    c.synth.params.defect_contrast = s.at("defect_contrast").get<int>();
    c.synth.n_defective = s.at("n_defective").get<int>();
    c.synth.n_nondefective = s.at("n_nondefective").get<int>();

    const json& p = j.at("preprocess");
    c.preprocess.canny.low = p.at("canny_low").get<double>();
    c.preprocess.canny.high = p.at("canny_high").get<double>();
    c.preprocess.canny.sigma = p.at("canny_sigma").get<double>();
    c.preprocess.grid.rows = p.at("grid_rows").get<int>();
    c.preprocess.grid.cols = p.at("grid_cols").get<int>();
    c.preprocess.ann_resolution = p.at("ann_resolution").get<int>();
    c.preprocess.normalize = p.at("normalize").get<bool>();

    c.model.hidden = j.at("model").at("hidden").get<int>();
    c.model.cnn_resolution = j.at("model").at("cnn_resolution").get<int>();

    const json& t = j.at("train");
    c.train.epochs = t.at("epochs").get<int>();
    c.train.learning_rate = t.at("learning_rate").get<double>();
    c.train.momentum = t.at("momentum").get<double>();
    c.train.batch_size = t.at("batch_size").get<int>();
    c.train.early_stop_patience = t.at("early_stop_patience").get<int>();

    const json& e = j.at("eval");
    c.eval.mode = e.at("mode").get<std::string>();
    c.eval.k = e.at("k").get<int>();
    c.eval.ratio = e.at("ratio").get<int>();
    c.eval.brightness = brightness_filter_from_string(e.at("brightness").get<std::string>());
    c.eval.stratified = e.at("stratified").get<bool>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::ConfigError, ex.what());
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, ex.what());
  }
  if (c.pipeline != "ann" && c.pipeline != "cnn") throw Error(ErrorCode::ConfigError, "pipeline must be ann or cnn");
  if (c.eval.mode != "split" && c.eval.mode != "kfold") throw Error(ErrorCode::ConfigError, "eval.mode must be split or kfold");
  if (c.eval.ratio < 0 || c.eval.ratio > 3) throw Error(ErrorCode::ConfigError, "eval.ratio must be 0 (off), 1, 2 or 3");
  if (c.threads < 1) throw Error(ErrorCode::ConfigError, "threads must be >= 1");
  try {
    c.train.validate();
    c.preprocess.canny.validate();
    c.synth.params.validate();
  } catch (const Error& ex) {
    throw Error(ErrorCode::ConfigError, ex.what());
  }
  return c;
}

json to_json(const RunConfig& c) {
  return {
      {"pipeline", c.pipeline},
      {"seed", c.seed},
      {"threads", c.threads},
      {"data", c.data},
      {"out", c.out},
      {"keep_models", c.keep_models},
      {"verbose", c.verbose},
      {"synth",
       {{"size", c.synth.params.size},
        {"brightness", to_string(c.synth.params.base_brightness)},
        {"grain_scale", c.synth.params.grain_scale},
        {"defect_count", c.synth.params.defect_count},
        {"defect_radius", c.synth.params.defect_radius},
        {"defect_contrast", c.synth.params.defect_contrast},
        {"n_defective", c.synth.n_defective},
        {"n_nondefective", c.synth.n_nondefective}}},
      {"preprocess",
       {{"canny_low", c.preprocess.canny.low},
        {"canny_high", c.preprocess.canny.high},
        {"canny_sigma", c.preprocess.canny.sigma},
        {"grid_rows", c.preprocess.grid.rows},
        {"grid_cols", c.preprocess.grid.cols},
        {"ann_resolution", c.preprocess.ann_resolution},
        {"normalize", c.preprocess.normalize}}},
      {"model", {{"hidden", c.model.hidden}, {"cnn_resolution", c.model.cnn_resolution}}},
      {"train",
       {{"epochs", c.train.epochs},
        {"learning_rate", c.train.learning_rate},
        {"momentum", c.train.momentum},
        {"batch_size", c.train.batch_size},
        {"early_stop_patience", c.train.early_stop_patience}}},
      {"eval",
       {{"mode", c.eval.mode},
        {"k", c.eval.k},
        {"ratio", c.eval.ratio},
        {"brightness", to_string(c.eval.brightness)},
        {"stratified", c.eval.stratified}}},
  };
}

RunConfig resolve_config(const std::string& default_pipeline, const json& file, const json& overrides) {
  std::string pipeline = default_pipeline;
  if (file.contains("pipeline")) pipeline = file["pipeline"].get<std::string>();
  if (overrides.contains("pipeline")) pipeline = overrides["pipeline"].get<std::string>();
  json merged = default_config_json(pipeline);
  merged.merge_patch(file);
  merged.merge_patch(overrides);
  merged["pipeline"] = pipeline;
  RunConfig cfg = config_from_json(merged);
  return cfg;
}

SeedPlan SeedPlan::from(std::uint64_t seed) {
  return {derive_seed(seed, 1), derive_seed(seed, 2), derive_seed(seed, 3),
          derive_seed(seed, 4), derive_seed(seed, 5), derive_seed(seed, 6)};
}

json SeedPlan::to_json() const {
  return {{"split", split}, {"folds", folds}, {"subset", subset}, {"init", init}, {"shuffle", shuffle}, {"synth", synth}};
}

}  // namespace hidescan::app
