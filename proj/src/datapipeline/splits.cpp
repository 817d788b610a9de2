#include <algorithm>
#include <numeric>

#include "hidescan/dataset.hpp"
#include "hidescan/error.hpp"
#include "hidescan/random.hpp"

namespace hidescan {

using nlohmann::json;

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(idx));
  return idx;
}

}  // namespace

SplitSizes split_60_5_35_sizes(std::size_t n) {
  const std::size_t train = 60 * n / 100;
  const std::size_t validation = (5 * n + 50) / 100;
  return {train, validation, n - train - validation};
}

SplitPlan split_60_5_35(const DatasetManifest& manifest, std::uint64_t seed) {
  const std::size_t n = manifest.size();
  if (n < 3) throw Error(ErrorCode::TooFewSamples, "a 60/5/35 split needs at least 3 samples, got " + std::to_string(n));
  const auto sizes = split_60_5_35_sizes(n);
  const auto idx = shuffled_indices(n, seed);
  SplitPlan plan;
  plan.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& id = manifest.samples[idx[i]].id;
    if (i < sizes.train) plan.train.push_back(id);
    else if (i < sizes.train + sizes.validation) plan.validation.push_back(id);
    else plan.test.push_back(id);
  }
  return plan;
}

std::vector<std::string> FoldPlan::train_ids(int i) const {
  std::vector<std::string> ids;
  for (int f = 0; f < k; ++f)
    if (f != i) ids.insert(ids.end(), folds[f].begin(), folds[f].end());
  return ids;
}

FoldPlan kfold_split(const DatasetManifest& manifest, int k, std::uint64_t seed, bool stratified) {
  const std::size_t n = manifest.size();
  if (k < 2 || static_cast<std::size_t>(k) > n)
    throw Error(ErrorCode::InvalidK, "k must lie in [2, " + std::to_string(n) + "], got " + std::to_string(k));
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.stratified = stratified;
  plan.folds.resize(k);
  const auto idx = shuffled_indices(n, seed);
  if (!stratified) {
    for (std::size_t i = 0; i < n; ++i) plan.folds[i % k].push_back(manifest.samples[idx[i]].id);
    return plan;
  }
  std::size_t dealt = 0;
  for (Label label : {Label::Defective, Label::NonDefective}) {
    for (std::size_t i : idx) {
      if (manifest.samples[i].label != label) continue;
      plan.folds[dealt++ % k].push_back(manifest.samples[i].id);
    }
  }
  return plan;
}

DatasetManifest build_ratio_subset(const DatasetManifest& manifest, int ratio, BrightnessFilter filter,
                                   std::uint64_t seed) {
  if (ratio < 1 || ratio > 3) throw Error(ErrorCode::InvalidArgument, "ratio must be 1, 2 or 3, got " + std::to_string(ratio));
  auto passes = [&](const Sample& s) {
    if (filter == BrightnessFilter::All) return true;
    if (s.brightness == Brightness::Unset)
      throw Error(ErrorCode::InvalidArgument, "sample '" + s.id + "' has no brightness category");
    return (filter == BrightnessFilter::Bright) == (s.brightness == Brightness::Bright);
  };
  std::vector<std::size_t> defective, pool;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const Sample& s = manifest.samples[i];
    if (!passes(s)) continue;
    (s.label == Label::Defective ? defective : pool).push_back(i);
  }
  const std::size_t needed = static_cast<std::size_t>(ratio) * defective.size();
  if (needed > pool.size()) throw InsufficientPoolError(needed, pool.size());

  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(pool));
  pool.resize(needed);
  std::vector<std::size_t> keep = defective;
  keep.insert(keep.end(), pool.begin(), pool.end());
  std::sort(keep.begin(), keep.end());
  DatasetManifest out;
  for (std::size_t i : keep) out.samples.push_back(manifest.samples[i]);
  return out;
}

json to_json(const SplitPlan& plan) {
  return {{"seed", plan.seed}, {"train", plan.train}, {"validation", plan.validation}, {"test", plan.test}};
}

SplitPlan split_plan_from_json(const json& j) {
  SplitPlan p;
  p.seed = j.at("seed").get<std::uint64_t>();
  p.train = j.at("train").get<std::vector<std::string>>();
  p.validation = j.at("validation").get<std::vector<std::string>>();
  p.test = j.at("test").get<std::vector<std::string>>();
  return p;
}

json to_json(const FoldPlan& plan) {
  return {{"k", plan.k}, {"seed", plan.seed}, {"stratified", plan.stratified}, {"folds", plan.folds}};
}

FoldPlan fold_plan_from_json(const json& j) {
  FoldPlan p;
  p.k = j.at("k").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.stratified = j.value("stratified", false);
  p.folds = j.at("folds").get<std::vector<std::vector<std::string>>>();
  return p;
}

}  // namespace hidescan
