// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
// Usage: hidescan_acceptance [work_dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "gradcheck.hpp"
#include "oracles.hpp"

#include "hidescan/app.hpp"
#include "hidescan/canny.hpp"
#include "hidescan/dataset.hpp"
#include "hidescan/features.hpp"
#include "hidescan/metrics.hpp"
#include "hidescan/network_spec.hpp"
#include "json.hpp"

using namespace hidescan;
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned floors and budgets.
constexpr double kShapeBudget = 1.0;
constexpr double kCannyBudget = 30.0;
constexpr double kGradBudget = 60.0;
constexpr double kAnnFloor = 90.0;
constexpr double kAnnBudget = 120.0;
constexpr double kCnnFloor = 85.0;
constexpr double kCnnBudget = 1200.0;
constexpr double kAucTol = 1e-12;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(int id, const std::string& name, const Outcome& o, double secs) {
  std::printf("%s %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
  failures += !o.pass;
}

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw ") + e.what()};
  }
  report(id, name, o, seconds_since(t0));
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  const int code = app::run_cli(args, out, std::cerr);
  if (code != 0) std::cerr << "command failed (" << code << "):" << out.str() << '\n';
  return code;
}

std::vector<std::vector<int>> as_grid(const EdgeMap& e) {
  std::vector<std::vector<int>> g(e.height(), std::vector<int>(e.width()));
  for (int r = 0; r < e.height(); ++r)
    for (int c = 0; c < e.width(); ++c) g[r][c] = e.at(r, c) == 255;
  return g;
}

DatasetManifest manifest_of(std::size_t n, std::size_t defective) {
  DatasetManifest m;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.id = "s" + std::to_string(i);
    s.path = s.id + ".png";
    s.label = i < defective ? Label::Defective : Label::NonDefective;
    m.samples.push_back(s);
  }
  return m;
}

Outcome table1_shapes() {
  const auto t0 = Clock::now();
  const NetworkSpec net = build_modified_alexnet(150);
  const auto shapes = infer_shapes(net);
  const std::vector<Shape> expected = {
      {35, 35, 96}, {35, 35, 96}, {35, 35, 96}, {17, 17, 96}, {17, 17, 256}, {17, 17, 256}, {17, 17, 256},
      {8, 8, 256},  {8, 8, 384},  {8, 8, 384},  {8, 8, 384},  {8, 8, 384},   {8, 8, 256},   {8, 8, 256},
      {5, 5, 256},  {4096},       {4096},       {4096},       {4096},        {4096},        {4096},
      {2},          {2},
  };
  const double secs = seconds_since(t0);
  std::size_t matched = net.input_shape == Shape{150, 150, 3};
  for (std::size_t i = 0; i < std::min(shapes.size(), expected.size()); ++i) matched += shapes[i] == expected[i];
  const std::size_t cells = expected.size() + 1;
  const bool ok = shapes.size() == expected.size() && matched == cells && secs < kShapeBudget;
  return {ok, std::to_string(matched) + "/" + std::to_string(cells) + " output sizes match, built in " +
                  fmt("%.4f", secs) + " s"};
}

Outcome published_accuracies() {
  struct Row {
    ConfusionMatrix cm;
    std::size_t num, den;
    std::string reported;
  };
  const Row rows[] = {{ConfusionMatrix::from_counts(530, 125, 6, 3), 533, 664, "80.3"},
                      {ConfusionMatrix::from_counts(616, 83, 159, 74), 690, 932, "74.0"},
                      {ConfusionMatrix::from_counts(381, 42, 92, 49), 430, 564, "76.2"},
                      {ConfusionMatrix::from_counts(250, 26, 69, 23), 273, 368, "74.1"}};
  Outcome o;
  for (const auto& r : rows) {
    const bool exact = r.cm.trace() == r.num && r.cm.total() == r.den;
    const std::string shown = format_accuracy(r.cm);
    const bool ok = exact && shown == r.reported;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += std::to_string(r.num) + "/" + std::to_string(r.den) + " -> " + shown + (ok ? "" : " (reported " + r.reported + ")");
    o.pass = o.pass && ok;
  }
  return o;
}

Outcome split_arithmetic() {
  const auto s = split_60_5_35_sizes(1897);
  const auto plan = split_60_5_35(manifest_of(1897, 233), 1);
  const bool ok = s.train == 1138 && s.validation == 95 && s.test == 664 && plan.train.size() == 1138 &&
                  plan.validation.size() == 95 && plan.test.size() == 664;
  return {ok, "(" + std::to_string(plan.train.size()) + ", " + std::to_string(plan.validation.size()) + ", " +
                  std::to_string(plan.test.size()) + ")"};
}

Image random_image(int h, int w, Rng& rng) {
  Image img(h, w, 1);
  if (rng.bernoulli(0.5)) {
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng.below(256));
  } else {  // piecewise-constant blocks give long connected edges
    const int cell = 2 + static_cast<int>(rng.below(6));
    std::vector<std::uint8_t> levels(static_cast<std::size_t>((h / cell + 1) * (w / cell + 1)));
    for (auto& l : levels) l = static_cast<std::uint8_t>(rng.below(256));
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) img.at(r, c) = levels[static_cast<std::size_t>((r / cell) * (w / cell + 1) + c / cell)];
  }
  return img;
}

Outcome canny_oracle() {
  const auto t0 = Clock::now();
  const CannyParams pairs[] = {{0.5, 0.9}, {0.1, 0.3}, {0.2, 0.6}, {0.3, 0.7}, {0.05, 0.95}};
  constexpr int kImages = 120;
  int matched = 0;
  Rng rng(4);
  for (int i = 0; i < kImages; ++i) {
    const Image img = random_image(32, 32, rng);
    const CannyParams& p = pairs[i % 5];
    matched += as_grid(canny(img, p)) == oracle::canny(img, p);
  }
  const double secs = seconds_since(t0);
  return {matched == kImages && secs < kCannyBudget,
          std::to_string(matched) + "/" + std::to_string(kImages) + " images bit-identical over 5 threshold pairs"};
}

Outcome feature_oracle() {
  constexpr int kImages = 120;
  int matched = 0, pairs_ok = 0, length_ok = 0;
  Rng rng(5);
  for (int i = 0; i < kImages; ++i) {
    EdgeMap map(50, 50);
    const double density = rng.uniform();
    for (int r = 0; r < 50; ++r)
      for (int c = 0; c < 50; ++c) map.set(r, c, rng.bernoulli(density));
    const auto f = block_frequency_features(map, {5, 5});
    length_ok += f.size() == 50;
    matched += f.values == oracle::block_counts(as_grid(map), 5, 5, true);
    bool sums = true;
    for (std::size_t b = 0; b + 1 < f.size(); b += 2) sums = sums && std::abs(f[b] + f[b + 1] - 1.0) <= 1e-15;
    pairs_ok += sums;
  }
  return {matched == kImages && pairs_ok == kImages && length_ok == kImages,
          std::to_string(matched) + "/" + std::to_string(kImages) + " match counting, " + std::to_string(pairs_ok) +
              " with unit pairs, " + std::to_string(length_ok) + " of length 50"};
}

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  double worst = 0;
  std::size_t trials = 0, kinds = 0;
  std::set<LayerKind> covered;
  bool enough = true;
  for (const auto& c : gradcheck::layer_cases()) {
    const auto errors = gradcheck::case_errors(c);
    enough = enough && errors.size() >= 20;
    trials += errors.size();
    ++kinds;
    covered.insert(c.spec.kind);
    for (double e : errors) worst = std::max(worst, e);
  }
  const double secs = seconds_since(t0);
  const bool all_kinds = covered.size() == 8;
  return {enough && all_kinds && worst <= gradcheck::kTol && secs < kGradBudget,
          std::to_string(kinds) + " cases over " + std::to_string(covered.size()) + " layer kinds, " +
              std::to_string(trials) + " trials, worst relative error " + fmt("%.2e", worst)};
}

Outcome partition_properties() {
  Rng rng(7);
  int plans = 0, bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.below(600);
    const auto m = manifest_of(n, rng.below(n + 1));
    std::multiset<std::string> all;
    for (const auto& s : m.samples) all.insert(s.id);
    const auto split = split_60_5_35(m, rng.next());
    std::multiset<std::string> got(split.train.begin(), split.train.end());
    got.insert(split.validation.begin(), split.validation.end());
    got.insert(split.test.begin(), split.test.end());
    bad += got != all;
    ++plans;
    const int k = 2 + static_cast<int>(rng.below(std::min<std::size_t>(n - 1, 20)));
    const auto folds = kfold_split(m, k, rng.next(), trial % 2 == 1);
    std::multiset<std::string> dealt;
    std::size_t lo = n, hi = 0;
    for (const auto& f : folds.folds) {
      dealt.insert(f.begin(), f.end());
      lo = std::min(lo, f.size());
      hi = std::max(hi, f.size());
    }
    bad += dealt != all || folds.folds.size() != static_cast<std::size_t>(k) || hi - lo > 1;
    ++plans;
  }
  double worst = 0;
  constexpr int kSets = 60;
  for (int set = 0; set < kSets; ++set) {
    const std::size_t n = 2 + rng.below(400);
    std::vector<int> labels(n);
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = i < 2 ? static_cast<int>(i) : rng.bernoulli(0.5);
      scores[i] = set % 2 ? static_cast<double>(rng.below(10)) : rng.uniform();
    }
    worst = std::max(worst, std::abs(roc(scores, labels).auc - oracle::auc(scores, labels)));
  }
  return {bad == 0 && worst <= kAucTol, std::to_string(plans - bad) + "/" + std::to_string(plans) +
                                             " plans partition exactly with fold spread <= 1; AUC vs pair count over " +
                                             std::to_string(kSets) + " sets, worst gap " + fmt("%.1e", worst)};
}

// Runs the synthetic end-to-end pipelines into `dir`; returns accuracies and timings.
struct EndToEnd {
  double ann_accuracy = 0, ann_seconds = 0, cnn_accuracy = 0, cnn_seconds = 0;
  bool ok = false;
};

EndToEnd end_to_end(const fs::path& dir) {
  EndToEnd r;
  fs::remove_all(dir);
  const std::string data = (dir / "data").string();
  if (cli({"gen-synth", "--out", data, "--n-defective", "250", "--n-nondefective", "250", "--seed", "1897",
           "--threads", "1"}) != 0)
    return r;
  auto t0 = Clock::now();
  if (cli({"train-ann", "--data", data, "--out", (dir / "ann").string(), "--seed", "1897", "--threads", "1"}) != 0)
    return r;
  r.ann_seconds = seconds_since(t0);
  r.ann_accuracy = json::parse(slurp(dir / "ann" / "metrics.json"))["test"]["accuracy"].get<double>();
  t0 = Clock::now();
  if (cli({"kfold", "--pipeline", "cnn", "--resolution", "50", "--k", "10", "--epochs", "20", "--data", data, "--out",
           (dir / "cnn").string(), "--seed", "1897", "--threads", "1", "--keep-models"}) != 0)
    return r;
  r.cnn_seconds = seconds_since(t0);
  r.cnn_accuracy = json::parse(slurp(dir / "cnn" / "kfold.json"))["mean_accuracy"].get<double>();
  r.ok = true;
  return r;
}

std::vector<std::string> primary_artifacts(const fs::path& dir) {
  std::vector<std::string> names = {"data/manifest.csv", "ann/model.bin", "ann/metrics.json", "cnn/kfold.json"};
  for (int f = 1; f <= 10; ++f) names.push_back("cnn/model_fold" + std::to_string(f) + ".bin");
  return names;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "hidescan_acceptance";
  fs::create_directories(work);

  criterion(1, "layer shape chain at 150x150", table1_shapes);
  criterion(2, "accuracies of the published confusion matrices", published_accuracies);
  criterion(3, "split of 1897 samples", split_arithmetic);
  criterion(4, "canny matches the reference detector", canny_oracle);
  criterion(5, "block features match direct counting", feature_oracle);
  criterion(6, "layer gradients match central differences", gradient_checks);
  criterion(7, "partition and AUC properties", partition_properties);

  EndToEnd first;
  criterion(8, "synthetic end-to-end accuracy", [&] {
    first = end_to_end(work / "run1");
    if (!first.ok) return Outcome{false, "pipeline command failed"};
    const bool ann = first.ann_accuracy >= kAnnFloor && first.ann_seconds < kAnnBudget;
    const bool cnn = first.cnn_accuracy >= kCnnFloor && first.cnn_seconds < kCnnBudget;
    return Outcome{ann && cnn, "ANN " + fmt("%.1f", first.ann_accuracy) + "% in " + fmt("%.1f", first.ann_seconds) +
                                   " s; CNN 10-fold mean " + fmt("%.1f", first.cnn_accuracy) + "% in " +
                                   fmt("%.1f", first.cnn_seconds) + " s"};
  });
  criterion(9, "determinism of the end-to-end run", [&] {
    const EndToEnd second = end_to_end(work / "run2");
    if (!first.ok || !second.ok) return Outcome{false, "pipeline command failed"};
    std::size_t same = 0;
    std::string differing;
    const auto names = primary_artifacts(work / "run1");
    for (const auto& name : names) {
      const auto a = work / "run1" / name, b = work / "run2" / name;
      if (fs::exists(a) && slurp(a) == slurp(b)) ++same;
      else differing += " " + name;
    }
    return Outcome{same == names.size(), std::to_string(same) + "/" + std::to_string(names.size()) +
                                             " artifacts byte-identical" + (differing.empty() ? "" : ", differ:" + differing)};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
