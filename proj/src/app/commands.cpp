#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "hidescan/app.hpp"
#include "hidescan/error.hpp"
#include "hidescan/image_io.hpp"
#include "hidescan/metrics.hpp"
#include "hidescan/model_io.hpp"

namespace hidescan::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Flag -> config location. Every command accepts every knob; irrelevant ones are simply recorded.
struct Knob {
  const char* flag;
  const char* pointer;
  enum Type { Int, UInt, Double, String, Flag } type;
  const char* help;
};

constexpr Knob kKnobs[] = {
    {"--seed", "/seed", Knob::UInt, "Top-level 64-bit seed"},
    {"--out", "/out", Knob::String, "Output directory"},
    {"--data", "/data", Knob::String, "Dataset root (defective/, non_defective/ or manifest.csv)"},
    {"--pipeline", "/pipeline", Knob::String, "ann or cnn"},
    {"--threads", "/threads", Knob::Int, "Worker threads (default from HIDESCAN_THREADS, else 1)"},
    {"--epochs", "/train/epochs", Knob::Int, "Training epochs"},
    {"--learning-rate", "/train/learning_rate", Knob::Double, "SGD learning rate"},
    {"--momentum", "/train/momentum", Knob::Double, "SGD momentum"},
    {"--batch-size", "/train/batch_size", Knob::Int, "Mini-batch size"},
    {"--patience", "/train/early_stop_patience", Knob::Int, "Early-stopping patience in epochs (0 = off)"},
    {"--hidden", "/model/hidden", Knob::Int, "Hidden neurons of the feature network"},
    {"--resolution", "/model/cnn_resolution", Knob::Int, "CNN input resolution: 50, 100, 150 or 200"},
    {"--ann-resolution", "/preprocess/ann_resolution", Knob::Int, "Resize target before edge detection"},
    {"--canny-low", "/preprocess/canny_low", Knob::Double, "Low hysteresis threshold (fraction of max)"},
    {"--canny-high", "/preprocess/canny_high", Knob::Double, "High hysteresis threshold (fraction of max)"},
    {"--sigma", "/preprocess/canny_sigma", Knob::Double, "Gaussian sigma of the edge detector"},
    {"--grid-rows", "/preprocess/grid_rows", Knob::Int, "Block grid rows"},
    {"--grid-cols", "/preprocess/grid_cols", Knob::Int, "Block grid columns"},
    {"--mode", "/eval/mode", Knob::String, "split or kfold"},
    {"--k", "/eval/k", Knob::Int, "Number of folds"},
    {"--ratio", "/eval/ratio", Knob::Int, "Non-defective per defective sample (1-3; 0 = all data)"},
    {"--brightness", "/eval/brightness", Knob::String, "all, bright or dark"},
    {"--stratified", "/eval/stratified", Knob::Flag, "Class-stratified folds"},
    {"--n-defective", "/synth/n_defective", Knob::Int, "Synthetic defective images"},
    {"--n-nondefective", "/synth/n_nondefective", Knob::Int, "Synthetic non-defective images"},
    {"--size", "/synth/size", Knob::Int, "Synthetic image size"},
    {"--synth-brightness", "/synth/brightness", Knob::String, "bright or dark base texture"},
    {"--contrast", "/synth/defect_contrast", Knob::Int, "Defect intensity drop"},
    {"--defects", "/synth/defect_count", Knob::Int, "Defects per defective image"},
    {"--grain-scale", "/synth/grain_scale", Knob::Double, "Wrinkle spacing in pixels"},
    {"--keep-models", "/keep_models", Knob::Flag, "Save every fold's model in kfold runs"},
    {"--verbose", "/verbose", Knob::Flag, "Per-epoch progress"},
};

struct CommandOptions {
  std::string config_path;
  std::vector<std::string> values = std::vector<std::string>(std::size(kKnobs));
  std::vector<CLI::Option*> options = std::vector<CLI::Option*>(std::size(kKnobs));
  std::string model;
  std::string image;
  std::string predictions;
};

void add_knobs(CLI::App& cmd, CommandOptions& o) {
  cmd.add_option("--config", o.config_path, "JSON config file (or a previous run.json)");
  for (std::size_t i = 0; i < std::size(kKnobs); ++i) {
    const Knob& k = kKnobs[i];
    o.options[i] = k.type == Knob::Flag ? cmd.add_flag(k.flag, k.help) : cmd.add_option(k.flag, o.values[i], k.help);
  }
}

json overrides_from(const CommandOptions& o) {
  json patch = json::object();
  for (std::size_t i = 0; i < std::size(kKnobs); ++i) {
    if (o.options[i]->count() == 0) continue;
    const Knob& k = kKnobs[i];
    const std::string& v = o.values[i];
    const json::json_pointer ptr(k.pointer);
    try {
      switch (k.type) {
        case Knob::Int: patch[ptr] = std::stoi(v); break;
        case Knob::UInt: patch[ptr] = static_cast<std::uint64_t>(std::stoull(v)); break;
        case Knob::Double: patch[ptr] = std::stod(v); break;
        case Knob::String: patch[ptr] = v; break;
        case Knob::Flag: patch[ptr] = true; break;
      }
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, std::string(k.flag) + ": cannot parse '" + v + "'");
    }
  }
  return patch;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
  try {
    json j = json::parse(in);
    // A run.json carries the resolved config under "config".
    if (j.contains("config") && j.contains("command")) return j["config"];
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

RunConfig resolve(const std::string& default_pipeline, const CommandOptions& o) {
  json file = o.config_path.empty() ? json::object() : read_json_file(o.config_path);
  json overrides = overrides_from(o);
  // The environment supplies the default thread count; config and flags still win.
  if (const char* env = std::getenv("HIDESCAN_THREADS"); env && !file.contains("threads") && !overrides.contains("threads")) {
    try {
      overrides["threads"] = std::stoi(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "HIDESCAN_THREADS must be an integer");
    }
  }
  return resolve_config(default_pipeline, file, overrides);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Records the resolved config, seeds and SHA-256 of every listed artifact.
void write_run_record(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                      const std::vector<std::string>& artifacts) {
  json digests = json::object();
  for (const auto& name : artifacts) digests[name] = sha256_file(dir / name);
  write_json(dir / "run.json", {{"command", command},
                                {"config", to_json(cfg)},
                                {"seed", cfg.seed},
                                {"seeds", SeedPlan::from(cfg.seed).to_json()},
                                {"artifacts", digests},
                                {"model_format_version", kModelFormatVersion}});
}

fs::path require_data(const RunConfig& cfg) {
  if (cfg.data.empty()) throw Error(ErrorCode::ConfigError, "--data (or config 'data') is required");
  if (!fs::is_directory(cfg.data)) throw Error(ErrorCode::EmptyDataset, "dataset root " + cfg.data + " does not exist");
  return cfg.data;
}

fs::path prepare_out(const RunConfig& cfg) {
  fs::path out = cfg.out;
  fs::create_directories(out);
  return out;
}

NetworkSpec network_for(const RunConfig& cfg) {
  if (cfg.pipeline == "ann") return build_ann(cfg.model.hidden, 2 * cfg.preprocess.grid.rows * cfg.preprocess.grid.cols);
  return build_modified_alexnet(cfg.model.cnn_resolution);
}

Dataset<float> load_dataset(const RunConfig& cfg, const DatasetManifest& manifest, const fs::path& root) {
  if (cfg.pipeline == "ann") return load_ann_dataset(manifest, root, cfg.preprocess);
  return load_cnn_dataset(manifest, root, cfg.model.cnn_resolution);
}

ModelMetadata metadata_for(const RunConfig& cfg, const TrainConfig& train) {
  ModelMetadata meta;
  meta.pipeline = cfg.pipeline;
  meta.train = train;
  if (cfg.pipeline == "ann") {
    meta.preprocessing = {{"canny_low", cfg.preprocess.canny.low},
                          {"canny_high", cfg.preprocess.canny.high},
                          {"canny_sigma", cfg.preprocess.canny.sigma},
                          {"grid_rows", cfg.preprocess.grid.rows},
                          {"grid_cols", cfg.preprocess.grid.cols},
                          {"ann_resolution", cfg.preprocess.ann_resolution},
                          {"normalize", cfg.preprocess.normalize}};
  } else {
    meta.preprocessing = {{"cnn_resolution", cfg.model.cnn_resolution}};
  }
  return meta;
}

std::vector<std::size_t> rows_for(const std::vector<std::string>& ids, const std::map<std::string, std::size_t>& row_of) {
  std::vector<std::size_t> rows;
  rows.reserve(ids.size());
  for (const auto& id : ids) rows.push_back(row_of.at(id));
  return rows;
}

std::string history_csv(const std::vector<EpochStats>& history, int fold = 0) {
  std::ostringstream s;
  if (fold == 0 || fold == 1) s << (fold ? "fold," : "") << "epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
  for (const auto& e : history) {
    if (fold) s << fold << ',';
    s << e.epoch << ',' << num(e.train_loss) << ',' << num(e.train_accuracy) << ','
      << (e.has_validation ? num(e.val_loss) : "") << ',' << (e.has_validation ? num(e.val_accuracy) : "") << '\n';
  }
  return s.str();
}

struct Prediction {
  std::string id;
  int label;
  double score;
};

ConfusionMatrix confusion_of(const std::vector<Prediction>& preds) {
  std::vector<int> p, l;
  for (const auto& x : preds) {
    p.push_back(decide(x.score));
    l.push_back(x.label);
  }
  return confusion(p, l);
}

json roc_summary(const std::vector<Prediction>& preds, const fs::path* csv_out) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& x : preds) {
    scores.push_back(x.score);
    labels.push_back(x.label);
  }
  const bool both = std::count(labels.begin(), labels.end(), 1) > 0 && std::count(labels.begin(), labels.end(), 0) > 0;
  if (!both) return nullptr;
  const RocCurve curve = roc(scores, labels);
  if (csv_out) {
    std::ostringstream s;
    write_roc_csv(s, curve);
    write_text(*csv_out, s.str());
  }
  return curve.auc;
}

EpochCallback progress(const RunConfig& cfg, std::ostream& out, const std::string& prefix) {
  if (!cfg.verbose) return {};
  return [&out, prefix](const EpochStats& e) {
    out << prefix << "epoch " << e.epoch << " loss " << num(e.train_loss) << " acc " << num(e.train_accuracy);
    if (e.has_validation) out << " val_loss " << num(e.val_loss) << " val_acc " << num(e.val_accuracy);
    out << '\n';
  };
}

// Commands -----------------------------------------------------------------------------------

int cmd_gen_synth(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = prepare_out(cfg);
  SynthParams params = cfg.synth.params;
  params.seed = SeedPlan::from(cfg.seed).synth;
  const auto manifest = generate_synthetic(params, cfg.synth.n_defective, cfg.synth.n_nondefective, dir, cfg.threads);
  std::size_t bright = 0;
  for (const auto& s : manifest.samples) bright += s.brightness == Brightness::Bright;
  write_run_record(dir, "gen-synth", cfg, {"manifest.csv"});
  out << "generated " << manifest.count(Label::Defective) << " defective and " << manifest.count(Label::NonDefective)
      << " non-defective images (" << bright << " bright, " << manifest.size() - bright << " dark) in " << dir.string()
      << '\n';
  return 0;
}

int cmd_extract(const RunConfig& cfg, std::ostream& out) {
  const fs::path root = require_data(cfg);
  const auto manifest = select_samples(cfg, root);
  const fs::path dir = prepare_out(cfg);
  std::vector<FeatureRow> rows;
  for (const auto& s : manifest.samples)
    rows.push_back({s.id, static_cast<int>(s.label), ann_features(read_image(root / s.path), cfg.preprocess)});
  std::ostringstream csv;
  write_feature_csv(csv, rows);
  write_text(dir / "features.csv", csv.str());
  write_run_record(dir, "extract", cfg, {"features.csv"});
  out << "wrote " << rows.size() << " feature rows to " << (dir / "features.csv").string() << '\n';
  return 0;
}

int cmd_train(const std::string& command, const RunConfig& cfg, std::ostream& out) {
  const fs::path root = require_data(cfg);
  const auto seeds = SeedPlan::from(cfg.seed);
  const auto manifest = select_samples(cfg, root);
  const auto data = load_dataset(cfg, manifest, root);
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < manifest.size(); ++i) row_of[manifest.samples[i].id] = i;

  const SplitPlan split = split_60_5_35(manifest, seeds.split);
  const auto train_set = subset(data, rows_for(split.train, row_of));
  const auto val_set = subset(data, rows_for(split.validation, row_of));
  const auto test_set = subset(data, rows_for(split.test, row_of));

  Network<float> net(network_for(cfg), seeds.init);
  TrainConfig tc = cfg.train;
  tc.seed = seeds.shuffle;
  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult result = train(net, train_set, val_set, tc, progress(cfg, out, ""));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir = prepare_out(cfg);
  save_model(dir / "model.bin", net, metadata_for(cfg, tc));
  write_text(dir / "history.csv", history_csv(result.history));
  write_json(dir / "split.json", to_json(split));

  std::vector<Prediction> preds;
  const auto scores = test_set.empty() ? std::vector<double>{} : net.predict_scores(test_set.inputs);
  std::ostringstream pcsv;
  pcsv << "id,label,score,prediction\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    preds.push_back({split.test[i], test_set.labels[i], scores[i]});
    pcsv << split.test[i] << ',' << test_set.labels[i] << ',' << num(scores[i]) << ',' << decide(scores[i]) << '\n';
  }
  write_text(dir / "predictions.csv", pcsv.str());

  std::vector<std::string> artifacts = {"model.bin", "history.csv", "split.json", "predictions.csv", "metrics.json"};
  const fs::path roc_path = dir / "roc.csv";
  json metrics = {{"pipeline", cfg.pipeline},
                  {"n_train", train_set.size()},
                  {"n_validation", val_set.size()},
                  {"n_test", test_set.size()},
                  {"epochs_run", result.history.size()},
                  {"best_epoch", result.best_epoch},
                  {"stopped_early", result.stopped_early}};
  if (!preds.empty()) {
    const auto cm = confusion_of(preds);
    metrics["test"] = to_json(cm);
    metrics["test"]["auc"] = roc_summary(preds, &roc_path);
    if (fs::exists(roc_path)) artifacts.push_back("roc.csv");
    out << format_confusion_table(cm);
  }
  write_json(dir / "metrics.json", metrics);
  write_run_record(dir, command, cfg, artifacts);
  out << "trained " << result.history.size() << " epochs in " << num(std::round(seconds * 10) / 10) << " s; artifacts in "
      << dir.string() << '\n';
  return 0;
}

int cmd_kfold(const RunConfig& cfg, std::ostream& out) {
  const fs::path root = require_data(cfg);
  const auto seeds = SeedPlan::from(cfg.seed);
  const auto manifest = select_samples(cfg, root);
  const auto data = load_dataset(cfg, manifest, root);
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < manifest.size(); ++i) row_of[manifest.samples[i].id] = i;

  const FoldPlan plan = kfold_split(manifest, cfg.eval.k, seeds.folds, cfg.eval.stratified);
  const fs::path dir = prepare_out(cfg);
  write_json(dir / "folds.json", to_json(plan));

  std::vector<std::string> artifacts = {"folds.json", "history.csv", "predictions.csv", "kfold.json"};
  json folds = json::array();
  std::vector<Prediction> pooled;
  std::string history;
  std::ostringstream pcsv;
  pcsv << "fold,id,label,score,prediction\n";
  double accuracy_sum = 0.0;
  const NetworkSpec spec = network_for(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  for (int f = 0; f < plan.k; ++f) {
    const auto train_set = subset(data, rows_for(plan.train_ids(f), row_of));
    const auto test_set = subset(data, rows_for(plan.folds[f], row_of));
    Network<float> net(spec, derive_seed(seeds.init, static_cast<std::uint64_t>(f)));
    TrainConfig tc = cfg.train;
    tc.seed = derive_seed(seeds.shuffle, static_cast<std::uint64_t>(f));
    const TrainResult result = train(net, train_set, Dataset<float>{}, tc,
                                     progress(cfg, out, "fold " + std::to_string(f + 1) + " "));
    history += history_csv(result.history, f + 1);

    const auto scores = net.predict_scores(test_set.inputs);
    std::vector<Prediction> preds;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      preds.push_back({plan.folds[f][i], test_set.labels[i], scores[i]});
      pcsv << f + 1 << ',' << plan.folds[f][i] << ',' << test_set.labels[i] << ',' << num(scores[i]) << ','
           << decide(scores[i]) << '\n';
    }
    pooled.insert(pooled.end(), preds.begin(), preds.end());
    const auto cm = confusion_of(preds);
    const double acc = accuracy(cm);
    accuracy_sum += acc;
    const auto bytes = serialize_model(net, metadata_for(cfg, tc));
    json fold = {{"fold", f + 1},
                 {"n_train", train_set.size()},
                 {"n_test", test_set.size()},
                 {"accuracy", acc},
                 {"confusion", cm.counts},
                 {"model_sha256", sha256_hex(bytes)}};
    folds.push_back(fold);
    if (cfg.keep_models) {
      const std::string name = "model_fold" + std::to_string(f + 1) + ".bin";
      write_text(dir / name, std::string(bytes.begin(), bytes.end()));
      artifacts.push_back(name);
    }
    out << "fold " << f + 1 << "/" << plan.k << ": accuracy " << num(std::round(acc * 10) / 10) << "% ("
        << cm.trace() << "/" << cm.total() << ")" << std::endl;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(dir / "history.csv", history);
  write_text(dir / "predictions.csv", pcsv.str());
  const fs::path roc_path = dir / "roc.csv";
  const auto pooled_cm = confusion_of(pooled);
  json summary = {{"pipeline", cfg.pipeline},
                  {"k", plan.k},
                  {"folds", folds},
                  {"mean_accuracy", accuracy_sum / plan.k},
                  {"pooled", to_json(pooled_cm)}};
  summary["pooled"]["auc"] = roc_summary(pooled, &roc_path);
  if (fs::exists(roc_path)) artifacts.push_back("roc.csv");
  write_json(dir / "kfold.json", summary);
  write_run_record(dir, "kfold", cfg, artifacts);
  out << "mean accuracy over " << plan.k << " folds: " << num(std::round(accuracy_sum / plan.k * 10) / 10) << "% ("
      << num(std::round(seconds * 10) / 10) << " s)\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& predictions_path, std::ostream& out) {
  if (predictions_path.empty()) throw Error(ErrorCode::ConfigError, "--predictions is required");
  std::ifstream in(predictions_path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + predictions_path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  const int label_col = column("label"), pred_col = column("prediction"), score_col = column("score");
  if (label_col < 0 || (pred_col < 0 && score_col < 0))
    throw Error(ErrorCode::IoError, predictions_path + ": needs a label column and a prediction or score column");
  std::vector<int> labels, predicted;
  std::vector<double> scores;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    try {
      labels.push_back(std::stoi(cells.at(label_col)));
      if (score_col >= 0) scores.push_back(std::stod(cells.at(score_col)));
      predicted.push_back(pred_col >= 0 ? std::stoi(cells.at(pred_col)) : decide(scores.back()));
    } catch (const std::exception&) {
      throw Error(ErrorCode::IoError, predictions_path + ": malformed row '" + line + "'");
    }
  }
  const auto cm = confusion(predicted, labels);
  const fs::path dir = prepare_out(cfg);
  json metrics = {{"confusion", to_json(cm)}, {"n", labels.size()}};
  std::vector<std::string> artifacts = {"metrics.json"};
  const bool both = cm.counts[0][0] + cm.counts[0][1] > 0 && cm.counts[1][0] + cm.counts[1][1] > 0;
  if (!scores.empty() && both) {
    const auto curve = roc(scores, labels);
    std::ostringstream s;
    write_roc_csv(s, curve);
    write_text(dir / "roc.csv", s.str());
    metrics["auc"] = curve.auc;
    artifacts.push_back("roc.csv");
  }
  write_json(dir / "metrics.json", metrics);
  write_run_record(dir, "eval", cfg, artifacts);
  out << format_confusion_table(cm);
  if (metrics.contains("auc")) out << "auc: " << num(metrics["auc"].get<double>()) << '\n';
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& image_path, std::ostream& out) {
  if (model_path.empty() || image_path.empty()) throw Error(ErrorCode::ConfigError, "--model and --image are required");
  const LoadedModel model = load_model(model_path);
  const Image img = read_image(image_path);
  const json& pre = model.meta.preprocessing;
  Tensor<float> input;
  if (model.meta.pipeline == "ann") {
    PreprocessConfig p;
    p.canny.low = pre.at("canny_low").get<double>();
    p.canny.high = pre.at("canny_high").get<double>();
    p.canny.sigma = pre.at("canny_sigma").get<double>();
    p.grid.rows = pre.at("grid_rows").get<int>();
    p.grid.cols = pre.at("grid_cols").get<int>();
    p.ann_resolution = pre.at("ann_resolution").get<int>();
    p.normalize = pre.value("normalize", true);
    const auto fv = ann_features(img, p);
    input = Tensor<float>({1, static_cast<int>(fv.size())}, std::vector<float>(fv.values.begin(), fv.values.end()));
  } else if (model.meta.pipeline == "cnn") {
    const int res = pre.at("cnn_resolution").get<int>();
    input = Tensor<float>({1, res, res, 3}, cnn_input(img, res));
  } else {
    throw Error(ErrorCode::IoError, "model file names unknown pipeline '" + model.meta.pipeline + "'");
  }
  const double score = model.network.predict_scores(input).front();
  out << (decide(score) ? "defective" : "non_defective") << ' ' << num(score) << '\n';
  return 0;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteLoss:
      return 3;
    case ErrorCode::EmptyDataset:
    case ErrorCode::UnreadableImage:
    case ErrorCode::IoError:
    case ErrorCode::TooFewSamples:
    case ErrorCode::InsufficientPool:
    case ErrorCode::SingleClass:
    case ErrorCode::LengthMismatch:
    case ErrorCode::NonBinaryInput:
    case ErrorCode::UnsupportedVersion:
    case ErrorCode::InvalidK:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hidescan: leather defect classification with edge features and a modified AlexNet", "hidescan"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    const char* default_pipeline;
  };
  static constexpr Command kCommands[] = {
      {"gen-synth", "Generate a synthetic leather dataset", "ann"},
      {"extract", "Write block-frequency edge features to features.csv", "ann"},
      {"train-ann", "Train the feature network on a 60/5/35 split", "ann"},
      {"train-cnn", "Train the modified AlexNet on a 60/5/35 split", "cnn"},
      {"kfold", "k-fold cross-validation (pipeline via --pipeline, default cnn)", "cnn"},
      {"eval", "Confusion matrix, accuracy and ROC from a predictions CSV", "ann"},
      {"predict", "Classify one image with a saved model", "ann"},
  };
  std::vector<std::unique_ptr<CommandOptions>> options;
  std::vector<CLI::App*> subs;
  for (const auto& c : kCommands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    options.push_back(std::make_unique<CommandOptions>());
    add_knobs(*sub, *options.back());
    if (std::string_view(c.name) == "predict") {
      sub->add_option("--model", options.back()->model, "Model file")->required();
      sub->add_option("--image", options.back()->image, "Image to classify")->required();
    }
    if (std::string_view(c.name) == "eval")
      sub->add_option("--predictions", options.back()->predictions, "CSV with label and prediction/score columns")
          ->required();
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    for (auto* sub : subs) {
      if (sub->parsed() && (e.get_name() == "CallForHelp")) {
        out << sub->help();
        return 0;
      }
    }
    err << "hidescan: " << e.what() << '\n';
    return 1;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const std::string name = kCommands[i].name;
      const CommandOptions& o = *options[i];
      if (name == "predict") return cmd_predict(o.model, o.image, out);
      const RunConfig cfg = resolve(kCommands[i].default_pipeline, o);
      if (name == "gen-synth") return cmd_gen_synth(cfg, out);
      if (name == "extract") return cmd_extract(cfg, out);
      if (name == "train-ann" || name == "train-cnn") {
        RunConfig c = cfg;
        if (c.pipeline != (name == "train-ann" ? "ann" : "cnn"))
          throw Error(ErrorCode::ConfigError, name + " cannot run pipeline '" + c.pipeline + "'");
        return cmd_train(name, c, out);
      }
      if (name == "kfold") return cmd_kfold(cfg, out);
      if (name == "eval") return cmd_eval(cfg, o.predictions, out);
    }
  } catch (const Error& e) {
    err << "hidescan: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "hidescan: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace hidescan::app
