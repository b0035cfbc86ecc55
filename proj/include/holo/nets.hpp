#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "holo/layers.hpp"

namespace holo::nets {

/// An ordered stack of layers with exclusively-owned parameters.
template <typename T>
class Network {
 public:
  Network() = default;
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  void add(LayerSpec spec) { layers_.push_back(make_layer(spec, T{})); }

  /// Seeds every parameter tensor deterministically (fan-in scaled uniform
  /// weights, zero biases, unit norm scale).
  void init(std::uint64_t seed) {
    Rng rng(Rng::derive(seed, 0x696e6974ULL));
    for (auto& l : layers_) l->init(rng);
  }

  const Tensor<T>& forward(const Tensor<T>& x, bool training) {
    const Tensor<T>* cur = &x;
    for (auto& l : layers_) cur = &l->forward(*cur, training);
    return *cur;
  }

  /// Backpropagates gy through the stack, optionally accumulating parameter
  /// gradients; the gradient w.r.t. the network input is discarded.
  void backward(const Tensor<T>& gy, bool want_param_grads = true) {
    const Tensor<T>* g = &gy;
    for (size_t i = layers_.size(); i-- > 0;)
      g = &layers_[i]->backward(*g, want_param_grads, i > 0);
  }

  /// Same as backward but also returns the gradient w.r.t. the input.
  const Tensor<T>& backward_to_input(const Tensor<T>& gy, bool want_param_grads) {
    const Tensor<T>* g = &gy;
    for (size_t i = layers_.size(); i-- > 0;)
      g = &layers_[i]->backward(*g, want_param_grads, true);
    return *g;
  }

  void zero_grads() {
    for (auto* p : params())
      if (p->trainable) p->grad.zero();
  }

  std::vector<Param<T>*> params() {
    std::vector<Param<T>*> out;
    for (auto& l : layers_)
      for (auto* p : l->params()) out.push_back(p);
    return out;
  }

  std::vector<LayerSpec> specs() const {
    std::vector<LayerSpec> s;
    s.reserve(layers_.size());
    for (const auto& l : layers_) s.push_back(l->spec());
    return s;
  }

  std::vector<Layer<T>*> layers() {
    std::vector<Layer<T>*> out;
    for (auto& l : layers_) out.push_back(l.get());
    return out;
  }

  size_t trainable_count() {
    size_t n = 0;
    for (auto* p : params())
      if (p->trainable) n += p->value.size();
    return n;
  }

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

/// Layer table of the hourglass generator; the starred super-resolution
/// block is appended when sr_enabled (output spatial size then doubles).
std::vector<LayerSpec> generator_specs(bool sr_enabled);

/// Layer table of the score-producing discriminator (2-channel input,
/// raw scalar score out; the sigmoid lives inside the losses).
std::vector<LayerSpec> discriminator_specs();

template <typename T>
Network<T> build_generator(bool sr_enabled, std::uint64_t seed) {
  Network<T> net;
  for (auto& s : generator_specs(sr_enabled)) net.add(std::move(s));
  net.init(seed);
  return net;
}

template <typename T>
Network<T> build_discriminator(std::uint64_t seed) {
  Network<T> net;
  for (auto& s : discriminator_specs()) net.add(std::move(s));
  net.init(seed);
  return net;
}

struct CheckpointMeta {
  std::int64_t iteration = 0;
  std::uint64_t seed = 0;
};

/// Writes a checkpoint directory: manifest.json plus one f32 LE blob per
/// tensor. The write is atomic (temp dir + rename).
void persist_params(Network<float>& net, const std::filesystem::path& dir,
                    const CheckpointMeta& meta);

/// Loads a checkpoint into an existing network. Any architecture or shape
/// mismatch raises CheckpointError before any tensor is modified.
CheckpointMeta load_params(Network<float>& net, const std::filesystem::path& dir);

/// Fixed-order flattening of the trainable parameters (layer order, then
/// declaration order within the layer).
std::vector<double> flatten_params(Network<float>& net);
std::vector<double> flatten_params(Network<double>& net);

}  // namespace holo::nets
