#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "hidescan/features.hpp"

namespace hidescan {

enum class Label { NonDefective = 0, Defective = 1 };
enum class Brightness { Unset, Bright, Dark };
enum class BrightnessFilter { All, Bright, Dark };

std::string_view to_string(Label l);
std::string_view to_string(Brightness b);
std::string_view to_string(BrightnessFilter f);
Label label_from_string(std::string_view s);
Brightness brightness_from_string(std::string_view s);
BrightnessFilter brightness_filter_from_string(std::string_view s);

struct Sample {
  std::string id;
  std::string path;  // relative to the dataset root
  Label label = Label::NonDefective;
  Brightness brightness = Brightness::Unset;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct DatasetManifest {
  std::vector<Sample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t count(Label l) const;
  /// Throws InvalidArgument on duplicate ids.
  void validate() const;
  const Sample& find(const std::string& id) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Scans `<root>/defective/*.png` and `<root>/non_defective/*.png` (sorted by file name) and
/// decodes every file. Throws EmptyDataset, or UnreadableImage naming the offending file.
DatasetManifest load_manifest(const std::filesystem::path& root);

/// Fills in each sample's brightness with the bright/dark rule.
void categorize_brightness(DatasetManifest& manifest, const std::filesystem::path& root,
                           const BrightnessRule& rule = {});

/// CSV columns: id,relative_path,label,brightness.
void write_manifest_csv(std::ostream& out, const DatasetManifest& manifest);
DatasetManifest read_manifest_csv(std::istream& in);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest load_manifest_csv(const std::filesystem::path& path);

/// Reads `<root>/manifest.csv` when present, otherwise scans the directory layout.
DatasetManifest open_dataset(const std::filesystem::path& root);

// ---------------------------------------------------------------------------------------------

struct SplitSizes {
  std::size_t train, validation, test;
};

/// floor(0.60 n) / round-half-up(0.05 n) / remainder.
SplitSizes split_60_5_35_sizes(std::size_t n);

struct SplitPlan {
  std::uint64_t seed = 0;
  std::vector<std::string> train, validation, test;
};

/// Seeded shuffle, then train/validation/test by the 60/5/35 rule. Throws TooFewSamples when n < 3.
SplitPlan split_60_5_35(const DatasetManifest& manifest, std::uint64_t seed);

struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  bool stratified = false;
  std::vector<std::vector<std::string>> folds;

  /// All ids outside fold `i`, in fold order.
  std::vector<std::string> train_ids(int i) const;
};

/// Seeded shuffle, then round-robin dealing into k folds. In stratified mode each class is
/// shuffled and dealt separately, defective first, continuing the rotation.
/// Throws InvalidK unless 2 <= k <= n.
FoldPlan kfold_split(const DatasetManifest& manifest, int k, std::uint64_t seed, bool stratified = false);

/// Keeps every defective sample passing the filter and draws ratio * D non-defective samples
/// from the filtered pool without replacement. Output keeps manifest order.
/// Throws InsufficientPoolError when the pool is too small. Filters other than All need
/// categorized brightness.
DatasetManifest build_ratio_subset(const DatasetManifest& manifest, int ratio, BrightnessFilter filter,
                                   std::uint64_t seed);

nlohmann::json to_json(const SplitPlan& plan);
SplitPlan split_plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FoldPlan& plan);
FoldPlan fold_plan_from_json(const nlohmann::json& j);

}  // namespace hidescan
