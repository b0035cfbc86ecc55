#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "holo/rng.hpp"
#include "holo/tensor.hpp"

namespace holo::nets {

enum class LayerKind { conv2d, transposed_conv2d, max_pool2d, global_pool2d, dense };
enum class Norm { batch_norm, none };
enum class Act { relu, tanh, none };

/// Declarative description of one table row of the architecture.
struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::conv2d;
  int k1 = 0;
  int k2 = 0;
  int c_in = 0;
  int c_out = 0;
  int stride = 1;
  Norm normalization = Norm::none;
  Act activation = Act::none;
  bool super_resolution_flag = false;
};

const char* to_string(LayerKind k);
const char* to_string(Norm n);
const char* to_string(Act a);

/// Throws ConfigError when consecutive layers have incompatible channels.
void validate_stack(const std::vector<LayerSpec>& specs);

template <typename T>
struct Param {
  std::string name;  // "weight", "bias", "bn_gamma", ...
  Tensor<T> value;
  Tensor<T> grad;
  bool trainable = true;
};

/// A differentiable layer. Forward stores whatever backward needs; the
/// network guarantees the input tensor stays alive and unchanged between
/// the forward and the matching backward call.
template <typename T>
class Layer {
 public:
  explicit Layer(LayerSpec spec) : spec_(std::move(spec)) {}
  virtual ~Layer() = default;

  const LayerSpec& spec() const { return spec_; }
  virtual void init(Rng&) {}
  virtual std::vector<Param<T>*> params() { return {}; }

  virtual const Tensor<T>& forward(const Tensor<T>& x, bool training) = 0;

  /// gy matches the forward output shape. Accumulates parameter gradients
  /// when want_param_grads; computes and returns the input gradient when
  /// want_input_grad (otherwise returns an empty tensor).
  virtual const Tensor<T>& backward(const Tensor<T>& gy, bool want_param_grads,
                                    bool want_input_grad) = 0;

 protected:
  LayerSpec spec_;
};

/// conv2d (stride 1, zero 'same' padding) + optional per-sample batch norm
/// + optional activation, matching one table row. Weight layout is the
/// GEMM-ready (k1*k2*c_in) x c_out matrix.
template <typename T>
class ConvBlock : public Layer<T> {
 public:
  explicit ConvBlock(LayerSpec spec);
  void init(Rng& rng) override;
  std::vector<Param<T>*> params() override;
  const Tensor<T>& forward(const Tensor<T>& x, bool training) override;
  const Tensor<T>& backward(const Tensor<T>& gy, bool want_param_grads,
                            bool want_input_grad) override;

 private:
  Param<T> w_, b_, gamma_, beta_, run_mean_, run_var_;
  Tensor<T> col_, y_, xhat_, gbuf_, gcol_, gx_;
  std::vector<T> inv_std_;
};

/// 2x2 stride-2 transposed convolution (exact upsampling taps). Weight
/// layout (k1, k2, c_in, c_out): each tap is a contiguous GEMM block.
template <typename T>
class ConvTranspose2d : public Layer<T> {
 public:
  explicit ConvTranspose2d(LayerSpec spec);
  void init(Rng& rng) override;
  std::vector<Param<T>*> params() override;
  const Tensor<T>& forward(const Tensor<T>& x, bool training) override;
  const Tensor<T>& backward(const Tensor<T>& gy, bool want_param_grads,
                            bool want_input_grad) override;

 private:
  Param<T> w_, b_;
  const Tensor<T>* x_ = nullptr;
  Tensor<T> y_, gx_;
  std::vector<T> tap_, gtap_;
};

/// 2x2 stride-2 max pooling.
template <typename T>
class MaxPool2d : public Layer<T> {
 public:
  explicit MaxPool2d(LayerSpec spec) : Layer<T>(std::move(spec)) {}
  const Tensor<T>& forward(const Tensor<T>& x, bool training) override;
  const Tensor<T>& backward(const Tensor<T>& gy, bool want_param_grads,
                            bool want_input_grad) override;

 private:
  Tensor<T> y_, gx_;
  std::vector<std::uint8_t> argmax_;
  int in_h_ = 0, in_w_ = 0;
};

/// Global max pooling to 1x1. Average pooling would be blind here: with
/// per-sample batch norm the spatial mean of every channel is a constant,
/// so only a max (or similar order statistic) passes sample information on.
template <typename T>
class GlobalMaxPool2d : public Layer<T> {
 public:
  explicit GlobalMaxPool2d(LayerSpec spec) : Layer<T>(std::move(spec)) {}
  const Tensor<T>& forward(const Tensor<T>& x, bool training) override;
  const Tensor<T>& backward(const Tensor<T>& gy, bool want_param_grads,
                            bool want_input_grad) override;

 private:
  Tensor<T> y_, gx_;
  std::vector<std::int32_t> argmax_;
  int in_h_ = 0, in_w_ = 0;
};

/// Fully connected layer on 1x1 feature maps.
template <typename T>
class Dense : public Layer<T> {
 public:
  explicit Dense(LayerSpec spec);
  void init(Rng& rng) override;
  std::vector<Param<T>*> params() override;
  const Tensor<T>& forward(const Tensor<T>& x, bool training) override;
  const Tensor<T>& backward(const Tensor<T>& gy, bool want_param_grads,
                            bool want_input_grad) override;

 private:
  Param<T> w_, b_;
  const Tensor<T>* x_ = nullptr;
  Tensor<T> y_, gx_;
};

std::unique_ptr<Layer<float>> make_layer(const LayerSpec& spec, float);
std::unique_ptr<Layer<double>> make_layer(const LayerSpec& spec, double);

}  // namespace holo::nets
