#include "hidescan/layers.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace hidescan {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>, Eigen::Unaligned, Eigen::OuterStride<>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>, Eigen::Unaligned, Eigen::OuterStride<>>;

template <typename T>
MatMap<T> mat(T* p, Eigen::Index rows, Eigen::Index cols, Eigen::Index stride) {
  return MatMap<T>(p, rows, cols, Eigen::OuterStride<>(stride));
}
template <typename T>
ConstMatMap<T> cmat(const T* p, Eigen::Index rows, Eigen::Index cols, Eigen::Index stride) {
  return ConstMatMap<T>(p, rows, cols, Eigen::OuterStride<>(stride));
}

template <typename T>
void init_uniform(Tensor<T>& w, std::size_t fan_in, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (auto& v : w.data()) v = static_cast<T>(rng.uniform(-limit, limit));
}

// ---------------------------------------------------------------------------------------------

template <typename T>
class ConvLayer final : public Layer<T> {
 public:
  ConvLayer(LayerSpec spec, Shape input_shape) : Layer<T>(std::move(spec), std::move(input_shape)) {
    const auto& s = this->spec_;
    in_h_ = this->input_shape_[0];
    in_w_ = this->input_shape_[1];
    cin_ = this->input_shape_[2];
    out_h_ = this->output_shape_[0];
    out_w_ = this->output_shape_[1];
    cout_ = this->output_shape_[2];
    groups_ = s.groups;
    cin_g_ = cin_ / groups_;
    cout_g_ = cout_ / groups_;
    k_ = s.kernel[0] * s.kernel[1] * cin_g_;
    weight_ = Tensor<T>({s.kernel[0], s.kernel[1], cin_g_, cout_});
    bias_ = Tensor<T>({cout_});
    dweight_ = Tensor<T>(weight_.shape());
    dbias_ = Tensor<T>(bias_.shape());
  }

  void forward(const Tensor<T>& x, Tensor<T>& y, bool) override {
    this->check_input(x);
    run(x, y, cols_);
  }

  void infer(const Tensor<T>& x, Tensor<T>& y) const override {
    this->check_input(x);
    std::vector<std::vector<T>> cols;
    run(x, y, cols);
  }

  void backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>* dx) override {
    const int n = dy.dim(0);
    const Eigen::Index rows = static_cast<Eigen::Index>(n) * out_h_ * out_w_;
    for (int g = 0; g < groups_; ++g) {
      auto dY = cmat(dy.ptr() + g * cout_g_, rows, cout_g_, cout_);
      auto col = cmat(cols_[g].data(), rows, k_, k_);
      mat(dweight_.ptr() + g * cout_g_, k_, cout_g_, cout_).noalias() = col.transpose() * dY;
    }
    auto db = dbias_.data();
    std::fill(db.begin(), db.end(), T{0});
    for (Eigen::Index r = 0; r < rows; ++r) {
      const T* row = dy.ptr() + r * cout_;
      for (int c = 0; c < cout_; ++c) db[c] += row[c];
    }
    if (!dx) return;
    dx->resize(this->batched(n, this->input_shape_));
    dx->fill(T{0});
    dcol_.resize(static_cast<std::size_t>(rows) * k_);
    for (int g = 0; g < groups_; ++g) {
      auto dY = cmat(dy.ptr() + g * cout_g_, rows, cout_g_, cout_);
      auto w = cmat(weight_.ptr() + g * cout_g_, k_, cout_g_, cout_);
      mat(dcol_.data(), rows, k_, k_).noalias() = dY * w.transpose();
      col2im(dcol_.data(), n, g, dx->ptr());
    }
  }

  std::vector<Param<T>> params() override {
    return {{this->spec_.name + ".weight", &weight_, &dweight_}, {this->spec_.name + ".bias", &bias_, &dbias_}};
  }

  void initialize(Rng& rng) override {
    init_uniform(weight_, static_cast<std::size_t>(k_), rng);
    bias_.fill(T{0});
  }

 private:
  void run(const Tensor<T>& x, Tensor<T>& y, std::vector<std::vector<T>>& cols) const {
    const int n = x.dim(0);
    const Eigen::Index rows = static_cast<Eigen::Index>(n) * out_h_ * out_w_;
    y.resize(this->batched(n, this->output_shape_));
    cols.resize(groups_);
    for (int g = 0; g < groups_; ++g) {
      cols[g].resize(static_cast<std::size_t>(rows) * k_);
      im2col(x.ptr(), n, g, cols[g].data());
      auto col = cmat(cols[g].data(), rows, k_, k_);
      auto w = cmat(weight_.ptr() + g * cout_g_, k_, cout_g_, cout_);
      mat(y.ptr() + g * cout_g_, rows, cout_g_, cout_).noalias() = col * w;
    }
    const T* b = bias_.ptr();
    for (Eigen::Index r = 0; r < rows; ++r) {
      T* row = y.ptr() + r * cout_;
      for (int c = 0; c < cout_; ++c) row[c] += b[c];
    }
  }

  // One row per output position, columns ordered (ky, kx, channel within the group).
  void im2col(const T* x, int n, int g, T* col) const {
    const auto& s = this->spec_;
    const int kh = s.kernel[0], kw = s.kernel[1];
    const std::size_t image = static_cast<std::size_t>(in_h_) * in_w_ * cin_;
    for (int b = 0; b < n; ++b) {
      const T* src = x + b * image;
      for (int oy = 0; oy < out_h_; ++oy) {
        for (int ox = 0; ox < out_w_; ++ox) {
          for (int ky = 0; ky < kh; ++ky) {
            const int iy = oy * s.stride[0] - s.padding[0] + ky;
            for (int kx = 0; kx < kw; ++kx) {
              const int ix = ox * s.stride[1] - s.padding[2] + kx;
              if (iy < 0 || iy >= in_h_ || ix < 0 || ix >= in_w_) {
                std::fill(col, col + cin_g_, T{0});
              } else {
                std::memcpy(col, src + (static_cast<std::size_t>(iy) * in_w_ + ix) * cin_ + g * cin_g_,
                            sizeof(T) * cin_g_);
              }
              col += cin_g_;
            }
          }
        }
      }
    }
  }

  void col2im(const T* col, int n, int g, T* dx) const {
    const auto& s = this->spec_;
    const int kh = s.kernel[0], kw = s.kernel[1];
    const std::size_t image = static_cast<std::size_t>(in_h_) * in_w_ * cin_;
    for (int b = 0; b < n; ++b) {
      T* dst = dx + b * image;
      for (int oy = 0; oy < out_h_; ++oy) {
        for (int ox = 0; ox < out_w_; ++ox) {
          for (int ky = 0; ky < kh; ++ky) {
            const int iy = oy * s.stride[0] - s.padding[0] + ky;
            for (int kx = 0; kx < kw; ++kx) {
              const int ix = ox * s.stride[1] - s.padding[2] + kx;
              if (iy >= 0 && iy < in_h_ && ix >= 0 && ix < in_w_) {
                T* d = dst + (static_cast<std::size_t>(iy) * in_w_ + ix) * cin_ + g * cin_g_;
                for (int c = 0; c < cin_g_; ++c) d[c] += col[c];
              }
              col += cin_g_;
            }
          }
        }
      }
    }
  }

  int in_h_, in_w_, cin_, out_h_, out_w_, cout_, groups_, cin_g_, cout_g_, k_;
  Tensor<T> weight_, bias_, dweight_, dbias_;
  std::vector<std::vector<T>> cols_;
  std::vector<T> dcol_;
};

// ---------------------------------------------------------------------------------------------

template <typename T>
class FullyConnectedLayer final : public Layer<T> {
 public:
  FullyConnectedLayer(LayerSpec spec, Shape input_shape) : Layer<T>(std::move(spec), std::move(input_shape)) {
    in_ = static_cast<int>(shape_size(this->input_shape_));
    out_ = this->spec_.filters;
    weight_ = Tensor<T>({out_, in_});
    bias_ = Tensor<T>({out_});
    dweight_ = Tensor<T>(weight_.shape());
    dbias_ = Tensor<T>(bias_.shape());
  }

  void forward(const Tensor<T>& x, Tensor<T>& y, bool) override { infer(x, y); }

  void infer(const Tensor<T>& x, Tensor<T>& y) const override {
    this->check_input(x);
    const int n = x.dim(0);
    y.resize({n, out_});
    auto X = cmat(x.ptr(), n, in_, in_);
    auto W = cmat(weight_.ptr(), out_, in_, in_);
    auto Y = mat(y.ptr(), n, out_, out_);
    Y.noalias() = X * W.transpose();
    const T* b = bias_.ptr();
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < out_; ++c) y[static_cast<std::size_t>(r) * out_ + c] += b[c];
  }

  void backward(const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>* dx) override {
    const int n = x.dim(0);
    auto X = cmat(x.ptr(), n, in_, in_);
    auto dY = cmat(dy.ptr(), n, out_, out_);
    mat(dweight_.ptr(), out_, in_, in_).noalias() = dY.transpose() * X;
    auto db = dbias_.data();
    std::fill(db.begin(), db.end(), T{0});
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < out_; ++c) db[c] += dy[static_cast<std::size_t>(r) * out_ + c];
    if (!dx) return;
    dx->resize(x.shape());
    auto W = cmat(weight_.ptr(), out_, in_, in_);
    mat(dx->ptr(), n, in_, in_).noalias() = dY * W;
  }

  std::vector<Param<T>> params() override {
    return {{this->spec_.name + ".weight", &weight_, &dweight_}, {this->spec_.name + ".bias", &bias_, &dbias_}};
  }

  void initialize(Rng& rng) override {
    init_uniform(weight_, static_cast<std::size_t>(in_), rng);
    bias_.fill(T{0});
  }

 private:
  int in_, out_;
  Tensor<T> weight_, bias_, dweight_, dbias_;
};

// ---------------------------------------------------------------------------------------------

template <typename T>
class MaxPoolLayer final : public Layer<T> {
 public:
  using Layer<T>::Layer;

  void forward(const Tensor<T>& x, Tensor<T>& y, bool) override {
    this->check_input(x);
    run(x, y, &argmax_);
  }
  void infer(const Tensor<T>& x, Tensor<T>& y) const override {
    this->check_input(x);
    run(x, y, nullptr);
  }

  void backward(const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>* dx) override {
    if (!dx) return;
    dx->resize(x.shape());
    dx->fill(T{0});
    for (std::size_t i = 0; i < argmax_.size(); ++i) (*dx)[argmax_[i]] += dy[i];
  }

 private:
  void run(const Tensor<T>& x, Tensor<T>& y, std::vector<std::size_t>* argmax) const {
    const auto& s = this->spec_;
    const int n = x.dim(0);
    const int ih = this->input_shape_[0], iw = this->input_shape_[1], ch = this->input_shape_[2];
    const int oh = this->output_shape_[0], ow = this->output_shape_[1];
    y.resize(this->batched(n, this->output_shape_));
    if (argmax) argmax->assign(y.size(), 0);
    std::vector<std::size_t> best(ch);
    std::size_t o = 0;
    for (int b = 0; b < n; ++b) {
      const std::size_t base = static_cast<std::size_t>(b) * ih * iw * ch;
      for (int oy = 0; oy < oh; ++oy) {
        const int y0 = std::max(oy * s.stride[0] - s.padding[0], 0);
        const int y1 = std::min(oy * s.stride[0] - s.padding[0] + s.kernel[0], ih);
        for (int ox = 0; ox < ow; ++ox) {
          const int x0 = std::max(ox * s.stride[1] - s.padding[2], 0);
          const int x1 = std::min(ox * s.stride[1] - s.padding[2] + s.kernel[1], iw);
          T* out = y.ptr() + o;
          std::fill(out, out + ch, -std::numeric_limits<T>::infinity());
          for (int iy = y0; iy < y1; ++iy) {
            for (int ix = x0; ix < x1; ++ix) {
              const std::size_t at = base + (static_cast<std::size_t>(iy) * iw + ix) * ch;
              const T* in = x.ptr() + at;
              for (int c = 0; c < ch; ++c) {
                if (in[c] > out[c]) {
                  out[c] = in[c];
                  best[c] = at + c;
                }
              }
            }
          }
          if (argmax) std::copy(best.begin(), best.end(), argmax->begin() + o);
          o += ch;
        }
      }
    }
  }

  std::vector<std::size_t> argmax_;
};

// ---------------------------------------------------------------------------------------------

// Cross-channel: y_c = x_c / (k + alpha / n * sum_{c' in window(c)} x_c'^2)^beta.
template <typename T>
class LrnLayer final : public Layer<T> {
 public:
  using Layer<T>::Layer;

  void forward(const Tensor<T>& x, Tensor<T>& y, bool) override {
    this->check_input(x);
    run(x, y, &scale_);
  }
  void infer(const Tensor<T>& x, Tensor<T>& y) const override {
    this->check_input(x);
    run(x, y, nullptr);
  }

  void backward(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>* dx) override {
    if (!dx) return;
    const auto& s = this->spec_;
    const int ch = this->input_shape_[2];
    const int half = s.window / 2;
    const T beta = static_cast<T>(s.lrn_beta);
    const T coeff = static_cast<T>(2.0 * s.lrn_alpha * s.lrn_beta / s.window);
    dx->resize(x.shape());
    std::vector<T> t(ch);
    const std::size_t pixels = x.size() / ch;
    for (std::size_t p = 0; p < pixels; ++p) {
      const std::size_t o = p * ch;
      for (int c = 0; c < ch; ++c) t[c] = dy[o + c] * y[o + c] / scale_[o + c];
      for (int c = 0; c < ch; ++c) {
        T acc = 0;
        for (int j = std::max(c - half, 0); j <= std::min(c + half, ch - 1); ++j) acc += t[j];
        (*dx)[o + c] = dy[o + c] * std::pow(scale_[o + c], -beta) - coeff * x[o + c] * acc;
      }
    }
  }

 private:
  void run(const Tensor<T>& x, Tensor<T>& y, std::vector<T>* scale_out) const {
    const auto& s = this->spec_;
    const int ch = this->input_shape_[2];
    const int half = s.window / 2;
    const T k = static_cast<T>(s.lrn_k);
    const T a = static_cast<T>(s.lrn_alpha / s.window);
    const T beta = static_cast<T>(s.lrn_beta);
    y.resize(x.shape());
    std::vector<T> local;
    std::vector<T>& scale = scale_out ? *scale_out : local;
    scale.resize(x.size());
    const std::size_t pixels = x.size() / ch;
    for (std::size_t p = 0; p < pixels; ++p) {
      const std::size_t o = p * ch;
      for (int c = 0; c < ch; ++c) {
        T sum = 0;
        for (int j = std::max(c - half, 0); j <= std::min(c + half, ch - 1); ++j) sum += x[o + j] * x[o + j];
        scale[o + c] = k + a * sum;
        y[o + c] = x[o + c] * std::pow(scale[o + c], -beta);
      }
    }
  }

  std::vector<T> scale_;
};

// ---------------------------------------------------------------------------------------------

template <typename T>
class ReluLayer final : public Layer<T> {
 public:
  using Layer<T>::Layer;
  void forward(const Tensor<T>& x, Tensor<T>& y, bool) override { infer(x, y); }
  void infer(const Tensor<T>& x, Tensor<T>& y) const override {
    this->check_input(x);
    y.resize(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T{0} ? x[i] : T{0};
  }
  void backward(const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>* dx) override {
    if (!dx) return;
    dx->resize(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) (*dx)[i] = x[i] > T{0} ? dy[i] : T{0};
  }
};

template <typename T>
class SigmoidLayer final : public Layer<T> {
 public:
  using Layer<T>::Layer;
  void forward(const Tensor<T>& x, Tensor<T>& y, bool) override { infer(x, y); }
  void infer(const Tensor<T>& x, Tensor<T>& y) const override {
    this->check_input(x);
    y.resize(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = T{1} / (T{1} + std::exp(-x[i]));
  }
  void backward(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>* dx) override {
    if (!dx) return;
    dx->resize(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) (*dx)[i] = dy[i] * y[i] * (T{1} - y[i]);
  }
};

template <typename T>
class SoftmaxLayer final : public Layer<T> {
 public:
  using Layer<T>::Layer;
  void forward(const Tensor<T>& x, Tensor<T>& y, bool) override { infer(x, y); }
  void infer(const Tensor<T>& x, Tensor<T>& y) const override {
    this->check_input(x);
    const int n = x.dim(0);
    const int k = this->input_shape_[0];
    y.resize(x.shape());
    for (int r = 0; r < n; ++r) {
      const T* in = x.ptr() + static_cast<std::size_t>(r) * k;
      T* out = y.ptr() + static_cast<std::size_t>(r) * k;
      const T m = *std::max_element(in, in + k);
      T sum = 0;
      for (int c = 0; c < k; ++c) sum += (out[c] = std::exp(in[c] - m));
      for (int c = 0; c < k; ++c) out[c] /= sum;
    }
  }
  void backward(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>* dx) override {
    if (!dx) return;
    const int n = x.dim(0);
    const int k = this->input_shape_[0];
    dx->resize(x.shape());
    for (int r = 0; r < n; ++r) {
      const std::size_t o = static_cast<std::size_t>(r) * k;
      T dot = 0;
      for (int c = 0; c < k; ++c) dot += dy[o + c] * y[o + c];
      for (int c = 0; c < k; ++c) (*dx)[o + c] = y[o + c] * (dy[o + c] - dot);
    }
  }
};

}  // namespace

// ---------------------------------------------------------------------------------------------

template <typename T>
Layer<T>::Layer(LayerSpec spec, Shape input_shape)
    : spec_(std::move(spec)), input_shape_(std::move(input_shape)) {
  output_shape_ = layer_output_shape(spec_, input_shape_);
}

template <typename T>
void Layer<T>::check_input(const Tensor<T>& x) const {
  if (x.rank() != input_shape_.size() + 1 ||
      !std::equal(input_shape_.begin(), input_shape_.end(), x.shape().begin() + 1)) {
    // Flattening into a fully connected layer accepts any batch whose sample size matches.
    if (spec_.kind == LayerKind::FullyConnected && x.rank() >= 2 &&
        x.size() / static_cast<std::size_t>(x.dim(0)) == shape_size(input_shape_))
      return;
    throw Error(ErrorCode::ShapeMismatch, "layer '" + spec_.name + "' expects N x " + shape_string(input_shape_) +
                                              ", got " + shape_string(x.shape()));
  }
}

template <typename T>
Shape Layer<T>::batched(int n, const Shape& s) const {
  Shape out;
  out.reserve(s.size() + 1);
  out.push_back(n);
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

template <typename T>
DropoutLayer<T>::DropoutLayer(LayerSpec spec, Shape input_shape, std::uint64_t seed)
    : Layer<T>(std::move(spec), std::move(input_shape)), rng_(seed) {}

template <typename T>
void DropoutLayer<T>::forward(const Tensor<T>& x, Tensor<T>& y, bool training) {
  this->check_input(x);
  y.resize(x.shape());
  const double rate = this->spec_.rate;
  if (!training || rate == 0.0) {
    mask_.assign(x.size(), T{1});
  } else if (!frozen_ || mask_.size() != x.size()) {
    const T scale = static_cast<T>(1.0 / (1.0 - rate));
    mask_.resize(x.size());
    for (auto& m : mask_) m = rng_.bernoulli(1.0 - rate) ? scale : T{0};
  }
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * mask_[i];
}

template <typename T>
void DropoutLayer<T>::infer(const Tensor<T>& x, Tensor<T>& y) const {
  this->check_input(x);
  y = x;
}

template <typename T>
void DropoutLayer<T>::backward(const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>* dx) {
  if (!dx) return;
  dx->resize(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) (*dx)[i] = dy[i] * mask_[i];
}

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& input_shape, std::uint64_t seed) {
  switch (spec.kind) {
    case LayerKind::Conv: return std::make_unique<ConvLayer<T>>(spec, input_shape);
    case LayerKind::FullyConnected: return std::make_unique<FullyConnectedLayer<T>>(spec, input_shape);
    case LayerKind::MaxPool: return std::make_unique<MaxPoolLayer<T>>(spec, input_shape);
    case LayerKind::LRN: return std::make_unique<LrnLayer<T>>(spec, input_shape);
    case LayerKind::ReLU: return std::make_unique<ReluLayer<T>>(spec, input_shape);
    case LayerKind::Sigmoid: return std::make_unique<SigmoidLayer<T>>(spec, input_shape);
    case LayerKind::SoftmaxOutput: return std::make_unique<SoftmaxLayer<T>>(spec, input_shape);
    case LayerKind::Dropout: return std::make_unique<DropoutLayer<T>>(spec, input_shape, seed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown layer kind");
}

// ---------------------------------------------------------------------------------------------

namespace {

template <typename T>
Tensor<T> as_batch(const Tensor<T>& x, std::size_t sample_rank, bool& was_single) {
  was_single = x.rank() == sample_rank;
  if (!was_single) return x;
  Shape s{1};
  s.insert(s.end(), x.shape().begin(), x.shape().end());
  return Tensor<T>(s, std::vector<T>(x.data().begin(), x.data().end()));
}

template <typename T>
Tensor<T> unbatch(Tensor<T> y, bool was_single) {
  if (was_single) y.reshape(Shape(y.shape().begin() + 1, y.shape().end()));
  return y;
}

template <typename T>
Tensor<T> apply_spatial(const Tensor<T>& x, const LayerSpec& spec) {
  if (x.rank() != 3 && x.rank() != 4)
    throw Error(ErrorCode::ShapeMismatch, "expected H x W x C or N x H x W x C, got " + shape_string(x.shape()));
  bool single = false;
  Tensor<T> batch = as_batch(x, 3, single);
  auto layer = make_layer<T>(spec, Shape(batch.shape().begin() + 1, batch.shape().end()), 0);
  Tensor<T> y;
  layer->infer(batch, y);
  return unbatch(std::move(y), single);
}

}  // namespace

template <typename T>
Tensor<T> conv2d(const Tensor<T>& x, const LayerSpec& spec, const Tensor<T>& weights, const Tensor<T>& bias) {
  if (spec.kind != LayerKind::Conv) throw Error(ErrorCode::InvalidArgument, "conv2d needs a Conv layer spec");
  if (x.rank() != 3 && x.rank() != 4)
    throw Error(ErrorCode::ShapeMismatch, "expected H x W x C or N x H x W x C, got " + shape_string(x.shape()));
  bool single = false;
  Tensor<T> batch = as_batch(x, 3, single);
  ConvLayer<T> layer(spec, Shape(batch.shape().begin() + 1, batch.shape().end()));
  auto p = layer.params();
  if (p[0].value->shape() != weights.shape())
    throw Error(ErrorCode::ShapeMismatch,
                "conv weights must be " + shape_string(p[0].value->shape()) + ", got " + shape_string(weights.shape()));
  if (p[1].value->shape() != bias.shape())
    throw Error(ErrorCode::ShapeMismatch, "conv bias must have " + std::to_string(spec.filters) + " entries");
  *p[0].value = weights;
  *p[1].value = bias;
  Tensor<T> y;
  layer.infer(batch, y);
  return unbatch(std::move(y), single);
}

template <typename T>
Tensor<T> maxpool(const Tensor<T>& x, const LayerSpec& spec) {
  if (spec.kind != LayerKind::MaxPool) throw Error(ErrorCode::InvalidArgument, "maxpool needs a MaxPool layer spec");
  return apply_spatial(x, spec);
}

template <typename T>
Tensor<T> lrn(const Tensor<T>& x, const LayerSpec& spec) {
  if (spec.kind != LayerKind::LRN) throw Error(ErrorCode::InvalidArgument, "lrn needs an LRN layer spec");
  return apply_spatial(x, spec);
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.data()) v = v > T{0} ? v : T{0};
  return y;
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.data()) v = T{1} / (T{1} + std::exp(-v));
  return y;
}

template <typename T>
Tensor<T> fully_connected(const Tensor<T>& x, const Tensor<T>& weights, const Tensor<T>& bias) {
  if (weights.rank() != 2 || bias.rank() != 1 || bias.dim(0) != weights.dim(0))
    throw Error(ErrorCode::ShapeMismatch, "weights must be outputs x inputs with one bias per output");
  const bool single = x.size() == static_cast<std::size_t>(weights.dim(1));
  const int n = single ? 1 : x.dim(0);
  if (x.size() != static_cast<std::size_t>(n) * weights.dim(1))
    throw Error(ErrorCode::ShapeMismatch,
                "input " + shape_string(x.shape()) + " does not flatten to " + std::to_string(weights.dim(1)));
  Tensor<T> batch({n, weights.dim(1)}, std::vector<T>(x.data().begin(), x.data().end()));
  FullyConnectedLayer<T> layer(fc_layer("fc", weights.dim(0)), {weights.dim(1)});
  auto p = layer.params();
  *p[0].value = weights;
  *p[1].value = bias;
  Tensor<T> y;
  layer.infer(batch, y);
  if (single) y.reshape({weights.dim(0)});
  return y;
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x) {
  const int k = x.shape().back();
  Tensor<T> y = x;
  for (std::size_t r = 0; r < x.size() / k; ++r) {
    T* row = y.ptr() + r * k;
    const T m = *std::max_element(row, row + k);
    T sum = 0;
    for (int c = 0; c < k; ++c) sum += (row[c] = std::exp(row[c] - m));
    for (int c = 0; c < k; ++c) row[c] /= sum;
  }
  return y;
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& x, double rate, Rng& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw Error(ErrorCode::InvalidArgument, "dropout rate must lie in [0, 1)");
  Tensor<T> y = x;
  if (!training || rate == 0.0) return y;
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  for (auto& v : y.data()) v = rng.bernoulli(1.0 - rate) ? v * scale : T{0};
  return y;
}

template <typename T>
double softmax_cross_entropy(const Tensor<T>& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || static_cast<std::size_t>(logits.dim(0)) != labels.size())
    throw Error(ErrorCode::ShapeMismatch, "logits must be N x classes with one label per row");
  const int k = logits.dim(1);
  double total = 0.0;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] < 0 || labels[r] >= k) throw Error(ErrorCode::ShapeMismatch, "label out of range");
    const T* row = logits.ptr() + r * k;
    const double m = *std::max_element(row, row + k);
    double sum = 0.0;
    for (int c = 0; c < k; ++c) sum += std::exp(static_cast<double>(row[c]) - m);
    total += std::log(sum) + m - static_cast<double>(row[labels[r]]);
  }
  return total / static_cast<double>(labels.size());
}

#define HIDESCAN_INSTANTIATE(T)                                                                          \
  template class Layer<T>;                                                                               \
  template class DropoutLayer<T>;                                                                        \
  template std::unique_ptr<Layer<T>> make_layer<T>(const LayerSpec&, const Shape&, std::uint64_t);       \
  template Tensor<T> conv2d<T>(const Tensor<T>&, const LayerSpec&, const Tensor<T>&, const Tensor<T>&);  \
  template Tensor<T> maxpool<T>(const Tensor<T>&, const LayerSpec&);                                     \
  template Tensor<T> lrn<T>(const Tensor<T>&, const LayerSpec&);                                         \
  template Tensor<T> relu<T>(const Tensor<T>&);                                                          \
  template Tensor<T> sigmoid<T>(const Tensor<T>&);                                                       \
  template Tensor<T> fully_connected<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);           \
  template Tensor<T> softmax<T>(const Tensor<T>&);                                                       \
  template Tensor<T> dropout<T>(const Tensor<T>&, double, Rng&, bool);                                   \
  template double softmax_cross_entropy<T>(const Tensor<T>&, std::span<const int>);

HIDESCAN_INSTANTIATE(float)
HIDESCAN_INSTANTIATE(double)

#undef HIDESCAN_INSTANTIATE

}  // namespace hidescan
