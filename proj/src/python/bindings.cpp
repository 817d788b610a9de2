#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "hidescan/app.hpp"
#include "hidescan/canny.hpp"
#include "hidescan/dataset.hpp"
#include "hidescan/error.hpp"
#include "hidescan/features.hpp"
#include "hidescan/image.hpp"
#include "hidescan/image_io.hpp"
#include "hidescan/metrics.hpp"
#include "hidescan/model_io.hpp"
#include "hidescan/network_spec.hpp"
#include "hidescan/synth.hpp"

namespace py = pybind11;
using namespace hidescan;

namespace {

using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

// Gray images come back as (H, W), colour as (H, W, 3).
py::array to_numpy(const Image& img) {
  std::vector<py::ssize_t> shape = {img.height(), img.width()};
  if (img.channels() == 3) shape.push_back(3);
  py::array_t<std::uint8_t> out(shape);
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

py::array to_numpy(const EdgeMap& e) {
  py::array_t<std::uint8_t> out({e.height(), e.width()});
  std::copy(e.data().begin(), e.data().end(), out.mutable_data());
  return out;
}

Image from_numpy(const ByteArray& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw Error(ErrorCode::InvalidDimension, "expected a (H, W) or (H, W, C) array");
  const int channels = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  return Image(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), channels,
               std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

DatasetManifest manifest_from(const std::vector<std::string>& ids, const std::vector<int>& labels) {
  if (ids.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "ids and labels differ in length");
  DatasetManifest m;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Sample s;
    s.id = ids[i];
    s.path = ids[i];
    s.label = labels[i] ? Label::Defective : Label::NonDefective;
    m.samples.push_back(s);
  }
  m.validate();
  return m;
}

}  // namespace

PYBIND11_MODULE(_hidescan, m) {
  m.doc() = "Leather defect classification: Canny block features, shallow network and modified AlexNet";

  py::register_exception<Error>(m, "HidescanError", PyExc_RuntimeError);

  m.def("read_image", [](const std::filesystem::path& p) { return to_numpy(read_image(p)); }, py::arg("path"));
  m.def("write_image", [](const std::filesystem::path& p, const ByteArray& a) { write_image(p, from_numpy(a)); },
        py::arg("path"), py::arg("image"));
  m.def("to_grayscale", [](const ByteArray& a) { return to_numpy(to_grayscale(from_numpy(a))); }, py::arg("image"));
  m.def("resize", [](const ByteArray& a, int h, int w) { return to_numpy(resize(from_numpy(a), h, w)); },
        py::arg("image"), py::arg("height"), py::arg("width"));

  m.def(
      "canny",
      [](const ByteArray& a, double low, double high, double sigma) {
        return to_numpy(canny(from_numpy(a), CannyParams{low, high, sigma}));
      },
      py::arg("gray"), py::arg("low") = CannyParams{}.low, py::arg("high") = CannyParams{}.high,
      py::arg("sigma") = CannyParams{}.sigma, "Binary edge map (0/255) of a gray image; thresholds are fractions of the peak gradient.");
  m.def(
      "block_frequency_features",
      [](const ByteArray& edges, int rows, int cols, bool normalize) {
        return block_frequency_features(from_numpy(edges), BlockGrid{rows, cols}, normalize).values;
      },
      py::arg("edges"), py::arg("rows") = 5, py::arg("cols") = 5, py::arg("normalize") = true,
      "Per block: share (or count) of 0 pixels, then of 255 pixels.");
  m.def(
      "brightness_category",
      [](const ByteArray& a) { return std::string(to_string(brightness_category(from_numpy(a)))); }, py::arg("image"));
  m.def(
      "ann_features",
      [](const ByteArray& a) { return app::ann_features(from_numpy(a), app::PreprocessConfig{}).values; },
      py::arg("image"), "Default feature pipeline: gray, resize to 50x50, Canny [0.5, 0.9], 5x5 block frequencies.");

  m.def(
      "split_sizes",
      [](std::size_t n) {
        const auto s = split_60_5_35_sizes(n);
        return py::make_tuple(s.train, s.validation, s.test);
      },
      py::arg("n"));
  m.def(
      "split_60_5_35",
      [](const std::vector<std::string>& ids, const std::vector<int>& labels, std::uint64_t seed) {
        const auto plan = split_60_5_35(manifest_from(ids, labels), seed);
        return py::make_tuple(plan.train, plan.validation, plan.test);
      },
      py::arg("ids"), py::arg("labels"), py::arg("seed"));
  m.def(
      "kfold_split",
      [](const std::vector<std::string>& ids, const std::vector<int>& labels, int k, std::uint64_t seed,
         bool stratified) { return kfold_split(manifest_from(ids, labels), k, seed, stratified).folds; },
      py::arg("ids"), py::arg("labels"), py::arg("k") = 10, py::arg("seed") = 0, py::arg("stratified") = false);

  m.def(
      "confusion",
      [](const std::vector<int>& preds, const std::vector<int>& labels) { return confusion(preds, labels).counts; },
      py::arg("predictions"), py::arg("labels"), "2x2 counts, rows actual, columns predicted, non-defective first.");
  m.def(
      "accuracy",
      [](const std::array<std::array<std::size_t, 2>, 2>& counts) { return accuracy(ConfusionMatrix{counts}); },
      py::arg("counts"));
  m.def(
      "format_accuracy",
      [](const std::array<std::array<std::size_t, 2>, 2>& counts) { return format_accuracy(ConfusionMatrix{counts}); },
      py::arg("counts"));
  m.def(
      "roc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        const RocCurve c = roc(scores, labels);
        std::vector<double> fpr, tpr;
        for (const auto& p : c.points) {
          fpr.push_back(p.fpr);
          tpr.push_back(p.tpr);
        }
        return py::make_tuple(fpr, tpr, c.auc);
      },
      py::arg("scores"), py::arg("labels"), "Returns (fpr, tpr, auc).");

  m.def(
      "alexnet_shapes",
      [](int resolution) {
        const NetworkSpec net = build_modified_alexnet(resolution);
        const auto shapes = infer_shapes(net);
        std::vector<std::pair<std::string, std::vector<int>>> out;
        for (std::size_t i = 0; i < shapes.size(); ++i) out.emplace_back(net.layers[i].name, shapes[i]);
        return out;
      },
      py::arg("resolution") = 150, "Output shape after every layer of the modified AlexNet.");
  m.def("ann_parameter_count", [](int hidden) { return parameter_count(build_ann(hidden)); }, py::arg("hidden") = 50);

  m.def(
      "render_synthetic",
      [](std::size_t index, bool defective, std::uint64_t seed, int size, const std::string& brightness,
         int contrast) {
        SynthParams p;
        p.seed = seed;
        p.size = size;
        p.base_brightness = brightness == "dark" ? BrightnessClass::Dark : BrightnessClass::Bright;
        p.defect_contrast = contrast;
        const SynthSample s = render_synthetic(p, index, defective);
        return py::make_tuple(to_numpy(s.image), to_numpy(s.mask));
      },
      py::arg("index"), py::arg("defective"), py::arg("seed") = 0, py::arg("size") = SynthParams{}.size,
      py::arg("brightness") = "bright", py::arg("contrast") = SynthParams{}.defect_contrast,
      "Returns (rgb image, defect mask).");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = app::run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one `hidescan` command in-process; returns (exit_code, stdout, stderr).");
}
