#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "hidescan/app.hpp"
#include "hidescan/error.hpp"
#include "json.hpp"

using namespace hidescan;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = app::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "hidescan_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

// A small synthetic set shared by the training cases.
const fs::path& small_set() {
  static const fs::path dir = [] {
    const auto d = scratch("synth");
    const auto r = run({"gen-synth", "--out", d.string(), "--n-defective", "30", "--n-nondefective", "30", "--size",
                        "64", "--seed", "5"});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"no-such-command"}).code == 1);
  CHECK(run({"train-ann", "--epochs", "many"}).code == 1);
  const auto r = run({"train-ann", "--bogus"});
  CHECK(r.code == 1);
  CHECK(!r.err.empty());
  CHECK(run({"predict", "--image", "x.png"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"train-cnn", "--pipeline", "ann", "--data", small_set().string(), "--out", scratch("x").string()}).code ==
        1);
  const auto cfg = scratch("badcfg.json");
  std::ofstream(cfg) << "{ not json";
  CHECK(run({"train-ann", "--config", cfg.string()}).code == 1);
}

TEST_CASE("data errors exit with 2") {
  const auto empty = scratch("empty");
  fs::create_directories(empty / "defective");
  const auto r = run({"train-ann", "--data", empty.string(), "--out", scratch("o1").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("EmptyDataset") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  CHECK(run({"train-ann", "--data", scratch("missing").string(), "--out", scratch("o2").string()}).code == 2);
  CHECK(run({"eval", "--predictions", scratch("none.csv").string(), "--out", scratch("o3").string()}).code == 2);
  const auto bogus = scratch("bogus.bin");
  std::ofstream(bogus) << "garbage";
  std::ofstream(scratch("img.pgm"), std::ios::binary) << "P5\n1 1\n255\n" << '\0';
  CHECK(run({"predict", "--model", bogus.string(), "--image", scratch("img.pgm").string()}).code == 2);
}

TEST_CASE("divergent training exits with 3") {
  const auto r = run({"train-ann", "--data", small_set().string(), "--out", scratch("div").string(), "--learning-rate",
                      "1e38", "--epochs", "5"});
  CHECK(r.code == 3);
  CHECK(r.err.find("NonFiniteLoss") != std::string::npos);
}

TEST_CASE("config precedence and run record") {
  const auto cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"seed": 77, "train": {"epochs": 7, "learning_rate": 0.05}, "model": {"hidden": 9}})";
  const auto out = scratch("prec");
  const auto r = run({"train-ann", "--config", cfg.string(), "--data", small_set().string(), "--out", out.string(),
                      "--epochs", "3"});
  REQUIRE(r.code == 0);
  const json rec = read_json(out / "run.json");
  CHECK(rec["command"] == "train-ann");
  CHECK(rec["seed"] == 77);
  CHECK(rec["config"]["train"]["epochs"] == 3);            // flag beats file
  CHECK(rec["config"]["train"]["learning_rate"] == 0.05);  // file beats default
  CHECK(rec["config"]["model"]["hidden"] == 9);
  CHECK(rec["config"]["preprocess"]["canny_low"] == 0.5);  // default
  CHECK(rec["config"]["preprocess"]["canny_high"] == 0.9);
  CHECK(rec["config"]["eval"]["k"] == 10);
  CHECK(rec["seeds"].contains("split"));
  CHECK(rec["seeds"].contains("init"));
  for (const char* name : {"model.bin", "history.csv", "metrics.json", "predictions.csv"}) {
    REQUIRE(rec["artifacts"].contains(name));
    CHECK(rec["artifacts"][name] == app::sha256_file(out / name));
  }
  const json m = read_json(out / "metrics.json");
  CHECK(m["epochs_run"] == 3);
  CHECK(m["n_train"].get<int>() + m["n_validation"].get<int>() + m["n_test"].get<int>() == 60);
  CHECK(m["n_train"] == 36);
  CHECK(m["n_validation"] == 3);
}

TEST_CASE("rerunning from a run record reproduces the artifacts") {
  const auto a = scratch("rep_a"), b = scratch("rep_b");
  REQUIRE(run({"train-ann", "--data", small_set().string(), "--out", a.string(), "--epochs", "20", "--seed", "3"}).code ==
          0);
  REQUIRE(run({"train-ann", "--data", small_set().string(), "--out", b.string(), "--epochs", "20", "--seed", "3"}).code ==
          0);
  CHECK(slurp(a / "model.bin") == slurp(b / "model.bin"));
  CHECK(slurp(a / "metrics.json") == slurp(b / "metrics.json"));
  // The run record alone is a sufficient config.
  const auto c = scratch("rep_c");
  REQUIRE(run({"train-ann", "--config", (a / "run.json").string(), "--out", c.string()}).code == 0);
  CHECK(slurp(a / "model.bin") == slurp(c / "model.bin"));
  const auto d = scratch("rep_d");
  REQUIRE(run({"train-ann", "--data", small_set().string(), "--out", d.string(), "--epochs", "20", "--seed", "4"}).code ==
          0);
  CHECK(slurp(a / "model.bin") != slurp(d / "model.bin"));
}

TEST_CASE("eval prints the accuracy of a known confusion matrix") {
  const auto csv = scratch("table3.csv");
  {
    std::ofstream f(csv);
    f << "id,label,prediction\n";
    int id = 0;
    auto emit = [&](int label, int pred, int n) {
      for (int i = 0; i < n; ++i) f << "s" << id++ << ',' << label << ',' << pred << '\n';
    };
    emit(0, 0, 530);
    emit(0, 1, 125);
    emit(1, 0, 6);
    emit(1, 1, 3);
  }
  const auto out = scratch("eval");
  const auto r = run({"eval", "--predictions", csv.string(), "--out", out.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("80.3") != std::string::npos);
  const json m = read_json(out / "metrics.json");
  CHECK(m.dump().find("530") != std::string::npos);
  CHECK(fs::exists(out / "run.json"));
}

TEST_CASE("kfold on 466 samples reports ten folds and a mean") {
  const auto data = scratch("synth466");
  REQUIRE(run({"gen-synth", "--out", data.string(), "--n-defective", "233", "--n-nondefective", "233", "--size", "50"})
              .code == 0);
  const auto out = scratch("kfold");
  const auto r = run({"kfold", "--pipeline", "ann", "--data", data.string(), "--out", out.string(), "--epochs", "2"});
  REQUIRE(r.code == 0);
  const json k = read_json(out / "kfold.json");
  REQUIRE(k["folds"].size() == 10);
  int sixes = 0, total = 0;
  double sum = 0;
  for (const auto& f : k["folds"]) {
    const int n = f["n_test"].get<int>();
    CHECK((n == 47 || n == 46));
    sixes += n == 47;
    total += n;
    CHECK(f["n_train"].get<int>() == 466 - n);
    sum += f["accuracy"].get<double>();
  }
  CHECK(sixes == 6);
  CHECK(total == 466);
  CHECK(k["mean_accuracy"].get<double>() == doctest::Approx(sum / 10).epsilon(1e-12));
  CHECK(fs::exists(out / "folds.json"));
}

TEST_CASE("extract and predict") {
  const auto ex = scratch("extract");
  REQUIRE(run({"extract", "--data", small_set().string(), "--out", ex.string()}).code == 0);
  std::ifstream f(ex / "features.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header.rfind("id,label,f0,", 0) == 0);
  CHECK(header.find("f49") != std::string::npos);

  const auto model = scratch("predict");
  REQUIRE(run({"train-ann", "--data", small_set().string(), "--out", model.string(), "--epochs", "5"}).code == 0);
  const auto r = run({"predict", "--model", (model / "model.bin").string(), "--image",
                      (small_set() / "defective" / "img_00000.png").string()});
  REQUIRE(r.code == 0);
  CHECK((r.out.rfind("defective ", 0) == 0 || r.out.rfind("non_defective ", 0) == 0));
}

TEST_CASE("documented defaults") {
  for (const char* pipeline : {"ann", "cnn"}) {
    const json d = app::default_config_json(pipeline);
    CHECK(d["pipeline"] == pipeline);
    CHECK(d["preprocess"]["canny_low"] == 0.5);
    CHECK(d["preprocess"]["canny_high"] == 0.9);
    CHECK(d["preprocess"]["grid_rows"] == 5);
    CHECK(d["preprocess"]["grid_cols"] == 5);
    CHECK(d["preprocess"]["ann_resolution"] == 50);
    CHECK(d["model"]["hidden"] == 50);
    CHECK(d["eval"]["k"] == 10);
    CHECK(d["train"]["momentum"] == 0.9);
  }
  CHECK(app::default_config_json("ann")["eval"]["mode"] == "split");
  CHECK(app::default_config_json("cnn")["eval"]["mode"] == "kfold");
  CHECK(app::default_config_json("cnn")["train"]["early_stop_patience"] == 0);
  CHECK_THROWS_AS(app::default_config_json("svm"), Error);
}
