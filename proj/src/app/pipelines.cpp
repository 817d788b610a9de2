#include "hidescan/app.hpp"
#include "hidescan/error.hpp"
#include "hidescan/image_io.hpp"
#include "hidescan/random.hpp"

namespace hidescan::app {

namespace fs = std::filesystem;

FeatureVector ann_features(const Image& img, const PreprocessConfig& pre) {
  const Image gray = img.channels() == 3 ? to_grayscale(img) : img;
  const Image small = resize(gray, pre.ann_resolution, pre.ann_resolution);
  return block_frequency_features(canny(small, pre.canny), pre.grid, pre.normalize);
}

std::vector<float> cnn_input(const Image& img, int resolution) {
  const Image rgb = img.channels() == 1 ? replicate_channels(img) : img;
  const Image small = resize(rgb, resolution, resolution);
  std::vector<float> out(small.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(small.data()[i]) / 255.0f - 0.5f;
  return out;
}

Dataset<float> load_ann_dataset(const DatasetManifest& manifest, const fs::path& root, const PreprocessConfig& pre) {
  if (manifest.samples.empty()) throw Error(ErrorCode::EmptyDataset, "manifest has no samples");
  const int dims = 2 * pre.grid.rows * pre.grid.cols;
  std::vector<float> values;
  values.reserve(manifest.size() * dims);
  Dataset<float> data;
  for (const auto& s : manifest.samples) {
    const FeatureVector fv = ann_features(read_image(root / s.path), pre);
    values.insert(values.end(), fv.values.begin(), fv.values.end());
    data.labels.push_back(static_cast<int>(s.label));
  }
  data.inputs = Tensor<float>({static_cast<int>(manifest.size()), dims}, std::move(values));
  return data;
}

Dataset<float> load_cnn_dataset(const DatasetManifest& manifest, const fs::path& root, int resolution) {
  if (manifest.samples.empty()) throw Error(ErrorCode::EmptyDataset, "manifest has no samples");
  std::vector<float> values;
  values.reserve(manifest.size() * resolution * resolution * 3);
  Dataset<float> data;
  for (const auto& s : manifest.samples) {
    const auto x = cnn_input(read_image(root / s.path), resolution);
    values.insert(values.end(), x.begin(), x.end());
    data.labels.push_back(static_cast<int>(s.label));
  }
  data.inputs = Tensor<float>({static_cast<int>(manifest.size()), resolution, resolution, 3}, std::move(values));
  return data;
}

DatasetManifest select_samples(const RunConfig& cfg, const fs::path& root) {
  DatasetManifest manifest = open_dataset(root);
  if (cfg.eval.brightness != BrightnessFilter::All) {
    const bool missing = std::any_of(manifest.samples.begin(), manifest.samples.end(),
                                     [](const Sample& s) { return s.brightness == Brightness::Unset; });
    if (missing) categorize_brightness(manifest, root);
  }
  if (cfg.eval.ratio > 0) {
    manifest = build_ratio_subset(manifest, cfg.eval.ratio, cfg.eval.brightness, SeedPlan::from(cfg.seed).subset);
  } else if (cfg.eval.brightness != BrightnessFilter::All) {
    const Brightness keep = cfg.eval.brightness == BrightnessFilter::Bright ? Brightness::Bright : Brightness::Dark;
    std::erase_if(manifest.samples, [&](const Sample& s) { return s.brightness != keep; });
  }
  if (manifest.samples.empty()) throw Error(ErrorCode::EmptyDataset, "no samples left after filtering");
  return manifest;
}

}  // namespace hidescan::app
