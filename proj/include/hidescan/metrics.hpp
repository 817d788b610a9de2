#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace hidescan {

/// Rows are the actual class, columns the predicted class; index 0 is non-defective, 1 defective.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 2> counts{};

  static ConfusionMatrix from_counts(std::size_t nn, std::size_t nd, std::size_t dn, std::size_t dd) {
    return {{{{nn, nd}, {dn, dd}}}};
  }

  std::size_t total() const noexcept { return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]; }
  std::size_t trace() const noexcept { return counts[0][0] + counts[1][1]; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Throws LengthMismatch on unequal lengths, InvalidArgument on non-binary entries.
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> labels);

/// 100 * trace / total. Throws EmptyMatrix when total is 0.
double accuracy(const ConfusionMatrix& cm);

/// Accuracy in tenths of a percent, rounded half up from the exact ratio.
long long accuracy_tenths(const ConfusionMatrix& cm);

/// One decimal, e.g. "80.3".
std::string format_accuracy(const ConfusionMatrix& cm);

/// Aligned text table for terminal output.
std::string format_confusion_table(const ConfusionMatrix& cm);

struct RocPoint {
  double fpr = 0;
  double tpr = 0;
  double threshold = std::numeric_limits<double>::infinity();  // scores >= threshold count as positive

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last
  double auc = 0;
};

/// Sweeps one threshold per distinct score, highest first; equal scores move together.
/// AUC by the trapezoidal rule. Throws SingleClass when only one label value is present.
RocCurve roc(std::span<const double> scores, std::span<const int> labels);

/// `fpr,tpr` rows with a header line.
void write_roc_csv(std::ostream& out, const RocCurve& curve);

nlohmann::json to_json(const ConfusionMatrix& cm);

}  // namespace hidescan
