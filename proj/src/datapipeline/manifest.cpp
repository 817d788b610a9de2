#include "hidescan/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "hidescan/error.hpp"
#include "hidescan/image_io.hpp"

namespace hidescan {

namespace fs = std::filesystem;

std::string_view to_string(Label l) { return l == Label::Defective ? "defective" : "non_defective"; }

std::string_view to_string(Brightness b) {
  switch (b) {
    case Brightness::Bright: return "bright";
    case Brightness::Dark: return "dark";
    case Brightness::Unset: break;
  }
  return "unset";
}

std::string_view to_string(BrightnessFilter f) {
  switch (f) {
    case BrightnessFilter::Bright: return "bright";
    case BrightnessFilter::Dark: return "dark";
    case BrightnessFilter::All: break;
  }
  return "all";
}

Label label_from_string(std::string_view s) {
  if (s == "defective" || s == "1") return Label::Defective;
  if (s == "non_defective" || s == "0") return Label::NonDefective;
  throw Error(ErrorCode::InvalidArgument, "unknown label '" + std::string(s) + "'");
}

Brightness brightness_from_string(std::string_view s) {
  if (s == "bright") return Brightness::Bright;
  if (s == "dark") return Brightness::Dark;
  if (s == "unset" || s.empty()) return Brightness::Unset;
  throw Error(ErrorCode::InvalidArgument, "unknown brightness '" + std::string(s) + "'");
}

BrightnessFilter brightness_filter_from_string(std::string_view s) {
  if (s == "all") return BrightnessFilter::All;
  if (s == "bright") return BrightnessFilter::Bright;
  if (s == "dark") return BrightnessFilter::Dark;
  throw Error(ErrorCode::InvalidArgument, "brightness filter must be all, bright or dark, got '" + std::string(s) + "'");
}

std::size_t DatasetManifest::count(Label l) const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [l](const Sample& s) { return s.label == l; }));
}

void DatasetManifest::validate() const {
  std::set<std::string> seen;
  for (const auto& s : samples)
    if (!seen.insert(s.id).second) throw Error(ErrorCode::InvalidArgument, "duplicate sample id '" + s.id + "'");
}

const Sample& DatasetManifest::find(const std::string& id) const {
  auto it = std::find_if(samples.begin(), samples.end(), [&](const Sample& s) { return s.id == id; });
  if (it == samples.end()) throw Error(ErrorCode::InvalidArgument, "no sample with id '" + id + "'");
  return *it;
}

DatasetManifest load_manifest(const fs::path& root) {
  DatasetManifest manifest;
  for (Label label : {Label::Defective, Label::NonDefective}) {
    const fs::path dir = root / std::string(to_string(label));
    if (!fs::is_directory(dir)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      read_png(file);  // throws UnreadableImage with the path
      Sample s;
      s.path = fs::relative(file, root).generic_string();
      s.id = std::string(to_string(label)) + "/" + file.stem().string();
      s.label = label;
      manifest.samples.push_back(std::move(s));
    }
  }
  if (manifest.samples.empty())
    throw Error(ErrorCode::EmptyDataset, "no images under " + (root / "defective").string() + " or " +
                                             (root / "non_defective").string());
  return manifest;
}

void categorize_brightness(DatasetManifest& manifest, const fs::path& root, const BrightnessRule& rule) {
  for (auto& s : manifest.samples) {
    const auto cls = brightness_category(read_image(root / s.path), rule);
    s.brightness = cls == BrightnessClass::Bright ? Brightness::Bright : Brightness::Dark;
  }
}

void write_manifest_csv(std::ostream& out, const DatasetManifest& manifest) {
  out << "id,relative_path,label,brightness\n";
  for (const auto& s : manifest.samples)
    out << s.id << ',' << s.path << ',' << to_string(s.label) << ',' << to_string(s.brightness) << '\n';
}

DatasetManifest read_manifest_csv(std::istream& in) {
  DatasetManifest manifest;
  std::string line;
  std::getline(in, line);
  if (line.rfind("id,relative_path,label", 0) != 0)
    throw Error(ErrorCode::InvalidArgument, "manifest header must start with id,relative_path,label");
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string id, path, label, brightness;
    std::getline(ss, id, ',');
    std::getline(ss, path, ',');
    std::getline(ss, label, ',');
    std::getline(ss, brightness, ',');
    manifest.samples.push_back({id, path, label_from_string(label), brightness_from_string(brightness)});
  }
  manifest.validate();
  return manifest;
}

void save_manifest(const fs::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_manifest_csv(out, manifest);
}

DatasetManifest load_manifest_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_manifest_csv(in);
}

DatasetManifest open_dataset(const fs::path& root) {
  const fs::path csv = root / "manifest.csv";
  if (fs::exists(csv)) {
    auto m = load_manifest_csv(csv);
    if (m.samples.empty()) throw Error(ErrorCode::EmptyDataset, csv.string() + " lists no samples");
    return m;
  }
  return load_manifest(root);
}

}  // namespace hidescan
