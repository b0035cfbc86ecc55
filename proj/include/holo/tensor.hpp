#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "holo/errors.hpp"

namespace holo {

/// Dense NHWC tensor (channels innermost). Deliberately minimal: the layer
/// kernels work on raw pointers plus BLAS, this class only owns storage
/// and shape.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int n, int h, int w, int c) : d_{n, h, w, c}, v_(size_t(n) * h * w * c) {}

  int n() const { return d_[0]; }
  int h() const { return d_[1]; }
  int w() const { return d_[2]; }
  int c() const { return d_[3]; }
  size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  std::array<int, 4> shape() const { return d_; }
  bool same_shape(const Tensor& o) const { return d_ == o.d_; }

  T* data() { return v_.data(); }
  const T* data() const { return v_.data(); }

  /// Pointer to one sample's (h*w) x c block.
  T* sample(int n) { return v_.data() + size_t(n) * d_[1] * d_[2] * d_[3]; }
  const T* sample(int n) const { return v_.data() + size_t(n) * d_[1] * d_[2] * d_[3]; }

  /// Pointer to the c contiguous channel values of one pixel.
  T* pixel(int n, int y, int x) {
    return v_.data() + ((size_t(n) * d_[1] + y) * d_[2] + x) * d_[3];
  }
  const T* pixel(int n, int y, int x) const {
    return v_.data() + ((size_t(n) * d_[1] + y) * d_[2] + x) * d_[3];
  }

  T& at(int n, int y, int x, int c) {
    return v_[((size_t(n) * d_[1] + y) * d_[2] + x) * d_[3] + c];
  }
  T at(int n, int y, int x, int c) const {
    return v_[((size_t(n) * d_[1] + y) * d_[2] + x) * d_[3] + c];
  }

  T& operator[](size_t i) { return v_[i]; }
  T operator[](size_t i) const { return v_[i]; }

  void fill(T v) { std::fill(v_.begin(), v_.end(), v); }
  void zero() { fill(T(0)); }

  void resize(int n, int h, int w, int c) {
    d_ = {n, h, w, c};
    v_.assign(size_t(n) * h * w * c, T(0));
  }

  /// Ensures shape without reallocating when capacity suffices.
  void ensure(int n, int h, int w, int c) {
    const size_t want = size_t(n) * h * w * c;
    d_ = {n, h, w, c};
    if (v_.size() != want) v_.resize(want);
  }

 private:
  std::array<int, 4> d_{0, 0, 0, 0};
  std::vector<T> v_;
};

}  // namespace holo
