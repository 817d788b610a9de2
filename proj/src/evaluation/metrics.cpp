#include "hidescan/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "hidescan/error.hpp"

namespace hidescan {

namespace {

void check_binary(std::span<const int> v, const char* what) {
  for (int x : v)
    if (x != 0 && x != 1)
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be 0 or 1, got " + std::to_string(x));
}

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
                                                std::to_string(labels.size()) + " labels");
  check_binary(predictions, "predictions");
  check_binary(labels, "labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) ++cm.counts[labels[i]][predictions[i]];
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no samples");
  return 100.0 * static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

long long accuracy_tenths(const ConfusionMatrix& cm) {
  const auto total = static_cast<long long>(cm.total());
  if (total == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no samples");
  // round(1000 * trace / total) with halves going up, in integers.
  return (2000LL * static_cast<long long>(cm.trace()) + total) / (2 * total);
}

std::string format_accuracy(const ConfusionMatrix& cm) {
  const long long t = accuracy_tenths(cm);
  return std::to_string(t / 10) + "." + std::to_string(t % 10);
}

std::string format_confusion_table(const ConfusionMatrix& cm) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%-16s %14s %10s\n"
                "%-16s %14zu %10zu\n"
                "%-16s %14zu %10zu\n"
                "accuracy: %s%% (%zu/%zu)\n",
                "actual\\pred", "Non-defective", "Defective", "Non-defective", cm.counts[0][0], cm.counts[0][1],
                "Defective", cm.counts[1][0], cm.counts[1][1], format_accuracy(cm).c_str(), cm.trace(), cm.total());
  return buf;
}

RocCurve roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(scores.size()) + " scores vs " +
                                                std::to_string(labels.size()) + " labels");
  check_binary(labels, "labels");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw Error(ErrorCode::SingleClass, "ROC needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / negatives, static_cast<double>(tp) / positives, s});
  }
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  curve.auc = area;
  return curve;
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  out << "fpr,tpr\n";
  for (const auto& p : curve.points) out << shortest(p.fpr) << ',' << shortest(p.tpr) << '\n';
}

nlohmann::json to_json(const ConfusionMatrix& cm) {
  return {{"orientation", "rows=actual,cols=predicted; order non_defective,defective"},
          {"counts", cm.counts},
          {"total", cm.total()},
          {"accuracy", cm.total() ? accuracy(cm) : 0.0},
          {"accuracy_display", cm.total() ? format_accuracy(cm) : std::string("n/a")}};
}

}  // namespace hidescan
