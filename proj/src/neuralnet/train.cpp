#include "hidescan/train.hpp"

#include <cmath>
#include <numeric>

namespace hidescan {

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::InvalidArgument, "epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "learning_rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw Error(ErrorCode::InvalidArgument, "momentum must lie in [0, 1)");
  if (batch_size < 1) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
  if (early_stop_patience < 0) throw Error(ErrorCode::InvalidArgument, "early_stop_patience must be >= 0");
}

template <typename T>
Dataset<T> subset(const Dataset<T>& data, const std::vector<std::size_t>& indices) {
  Dataset<T> out;
  if (indices.empty()) return out;
  const std::size_t sample = data.inputs.size() / data.size();
  Shape s = data.inputs.shape();
  s[0] = static_cast<int>(indices.size());
  std::vector<T> values(indices.size() * sample);
  out.labels.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const T* src = data.inputs.ptr() + indices[i] * sample;
    std::copy(src, src + sample, values.begin() + i * sample);
    out.labels.push_back(data.labels[indices[i]]);
  }
  out.inputs = Tensor<T>(s, std::move(values));
  return out;
}

namespace {

template <typename T>
void check_dataset(const Network<T>& net, const Dataset<T>& data, const char* what) {
  if (data.empty()) return;
  const Shape& in = data.inputs.shape();
  if (in.empty() || static_cast<std::size_t>(in[0]) != data.size() ||
      !std::equal(in.begin() + 1, in.end(), net.spec().input_shape.begin(), net.spec().input_shape.end()))
    throw Error(ErrorCode::ShapeMismatch, std::string(what) + " inputs " + shape_string(in) +
                                              " do not match N x " + shape_string(net.spec().input_shape) +
                                              " with " + std::to_string(data.size()) + " labels");
}

template <typename T>
int count_correct(const Tensor<T>& out, std::span<const int> labels) {
  const int n = static_cast<int>(labels.size());
  const int k = static_cast<int>(out.size() / n);
  int correct = 0;
  for (int r = 0; r < n; ++r) correct += decide(static_cast<double>(out[static_cast<std::size_t>(r) * k + k - 1])) == labels[r];
  return correct;
}

}  // namespace

template <typename T>
std::pair<double, double> evaluate_loss_accuracy(const Network<T>& net, const Dataset<T>& data, int batch_size) {
  if (data.empty()) return {0.0, 0.0};
  const auto scores = net.predict_scores(data.inputs, batch_size);
  double loss = 0.0;
  int correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double p = std::clamp(scores[i], 1e-12, 1.0 - 1e-12);
    loss -= data.labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
    correct += decide(scores[i]) == data.labels[i];
  }
  const double n = static_cast<double>(data.size());
  return {loss / n, 100.0 * correct / n};
}

template <typename T>
TrainResult train(Network<T>& net, const Dataset<T>& train_set, const Dataset<T>& val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.empty()) throw Error(ErrorCode::EmptyDataset, "training set is empty");
  check_dataset(net, train_set, "training");
  check_dataset(net, val_set, "validation");

  auto params = net.params();
  std::vector<std::vector<T>> velocity;
  velocity.reserve(params.size());
  for (const auto& p : params) velocity.emplace_back(p.value->size(), T{0});

  const bool early_stopping = cfg.early_stop_patience > 0 && !val_set.empty();
  const std::size_t n = train_set.size();
  const std::size_t sample = train_set.inputs.size() / n;
  std::vector<std::size_t> order(n);

  TrainResult result;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<T> best_weights;
  int stale = 0;
  const T lr = static_cast<T>(cfg.learning_rate);
  const T mu = static_cast<T>(cfg.momentum);

  Tensor<T> batch;
  std::vector<int> labels;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    int correct = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t count = std::min<std::size_t>(cfg.batch_size, n - start);
      Shape s = train_set.inputs.shape();
      s[0] = static_cast<int>(count);
      batch.resize(s);
      labels.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const T* src = train_set.inputs.ptr() + order[start + i] * sample;
        std::copy(src, src + sample, batch.ptr() + i * sample);
        labels[i] = train_set.labels[order[start + i]];
      }
      const Tensor<T>& out = net.forward(batch, true);
      correct += count_correct(out, labels);
      const double loss = net.backward(labels);
      if (!std::isfinite(loss)) throw NonFiniteLossError(epoch);
      loss_sum += loss * static_cast<double>(count);

      for (std::size_t p = 0; p < params.size(); ++p) {
        T* w = params[p].value->ptr();
        const T* g = params[p].grad->ptr();
        T* v = velocity[p].data();
        const std::size_t size = params[p].value->size();
        for (std::size_t i = 0; i < size; ++i) {
          v[i] = mu * v[i] - lr * g[i];
          w[i] += v[i];
        }
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(n);
    stats.train_accuracy = 100.0 * correct / static_cast<double>(n);
    if (!val_set.empty()) {
      stats.has_validation = true;
      std::tie(stats.val_loss, stats.val_accuracy) = evaluate_loss_accuracy(net, val_set, cfg.batch_size);
    }
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);

    if (early_stopping) {
      if (stats.val_loss < best_val) {
        best_val = stats.val_loss;
        best_weights = net.flat_parameters();
        result.best_epoch = epoch;
        stale = 0;
      } else if (++stale >= cfg.early_stop_patience) {
        result.stopped_early = true;
        break;
      }
    } else {
      result.best_epoch = epoch;
    }
  }
  if (early_stopping && !best_weights.empty()) net.set_flat_parameters(best_weights);
  return result;
}

template Dataset<float> subset<float>(const Dataset<float>&, const std::vector<std::size_t>&);
template Dataset<double> subset<double>(const Dataset<double>&, const std::vector<std::size_t>&);
template TrainResult train<float>(Network<float>&, const Dataset<float>&, const Dataset<float>&, const TrainConfig&,
                                  const EpochCallback&);
template TrainResult train<double>(Network<double>&, const Dataset<double>&, const Dataset<double>&,
                                   const TrainConfig&, const EpochCallback&);
template std::pair<double, double> evaluate_loss_accuracy<float>(const Network<float>&, const Dataset<float>&, int);
template std::pair<double, double> evaluate_loss_accuracy<double>(const Network<double>&, const Dataset<double>&,
                                                                  int);

}  // namespace hidescan
