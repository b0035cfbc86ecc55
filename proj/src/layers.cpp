#include "holo/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "holo/errors.hpp"
#include "holo/gemm.hpp"

namespace holo::nets {

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;

// Unrolls padded stride-1 patches into an (h*w) x (k1*k2*c) matrix; patch
// entries are ordered (ky, kx, channel), so each ky row of a patch is one
// contiguous span of the NHWC input.
template <typename T>
void im2col(const T* x, int h, int w, int c, int k1, int k2, T* col) {
  const int pad_y = k1 / 2;
  const int pad_x = k2 / 2;
  const int span = k2 * c;
  const size_t patch = size_t(k1) * span;
  for (int y = 0; y < h; ++y) {
    for (int x0 = 0; x0 < w; ++x0) {
      T* dst = col + (size_t(y) * w + x0) * patch;
      for (int ky = 0; ky < k1; ++ky, dst += span) {
        const int iy = y + ky - pad_y;
        if (iy < 0 || iy >= h) {
          std::fill(dst, dst + span, T(0));
          continue;
        }
        const int ix0 = x0 - pad_x;
        int lo = std::max(0, -ix0);         // first patch column with valid input
        int hi = std::min(k2, w - ix0);     // one past the last valid column
        if (lo > 0) std::fill(dst, dst + lo * c, T(0));
        if (hi > lo)
          std::memcpy(dst + lo * c, x + (size_t(iy) * w + ix0 + lo) * c,
                      size_t(hi - lo) * c * sizeof(T));
        if (hi < k2) std::fill(dst + hi * c, dst + span, T(0));
      }
    }
  }
}

// Adjoint of im2col: scatter-adds patch gradients back onto the image.
template <typename T>
void col2im_acc(const T* col, int h, int w, int c, int k1, int k2, T* gx) {
  const int pad_y = k1 / 2;
  const int pad_x = k2 / 2;
  const int span = k2 * c;
  const size_t patch = size_t(k1) * span;
  for (int y = 0; y < h; ++y) {
    for (int x0 = 0; x0 < w; ++x0) {
      const T* src = col + (size_t(y) * w + x0) * patch;
      for (int ky = 0; ky < k1; ++ky, src += span) {
        const int iy = y + ky - pad_y;
        if (iy < 0 || iy >= h) continue;
        const int ix0 = x0 - pad_x;
        const int lo = std::max(0, -ix0);
        const int hi = std::min(k2, w - ix0);
        if (hi <= lo) continue;
        T* dst = gx + (size_t(iy) * w + ix0 + lo) * c;
        const T* s = src + lo * c;
        const int count = (hi - lo) * c;
        for (int i = 0; i < count; ++i) dst[i] += s[i];
      }
    }
  }
}

template <typename T>
void apply_activation(Act act, T* y, size_t n) {
  switch (act) {
    case Act::relu:
      for (size_t i = 0; i < n; ++i) y[i] = y[i] > T(0) ? y[i] : T(0);
      break;
    case Act::tanh:
      for (size_t i = 0; i < n; ++i) y[i] = std::tanh(y[i]);
      break;
    case Act::none: break;
  }
}

// g := dL/d(pre-activation), derived from post-activation values.
template <typename T>
void activation_backward(Act act, const T* y, const T* gy, T* g, size_t n) {
  switch (act) {
    case Act::relu:
      for (size_t i = 0; i < n; ++i) g[i] = y[i] > T(0) ? gy[i] : T(0);
      break;
    case Act::tanh:
      for (size_t i = 0; i < n; ++i) g[i] = gy[i] * (T(1) - y[i] * y[i]);
      break;
    case Act::none:
      if (g != gy) std::copy(gy, gy + n, g);
      break;
  }
}

template <typename T>
void init_uniform(Tensor<T>& t, Rng& rng, double bound) {
  for (size_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<T>(rng.uniform(-bound, bound));
}

}  // namespace

const char* to_string(LayerKind k) {
  switch (k) {
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::transposed_conv2d: return "transposed_conv2d";
    case LayerKind::max_pool2d: return "max_pool2d";
    case LayerKind::global_pool2d: return "global_pool2d";
    case LayerKind::dense: return "dense";
  }
  return "?";
}

const char* to_string(Norm n) { return n == Norm::batch_norm ? "batch_norm" : "none"; }

const char* to_string(Act a) {
  switch (a) {
    case Act::relu: return "relu";
    case Act::tanh: return "tanh";
    case Act::none: return "none";
  }
  return "?";
}

void validate_stack(const std::vector<LayerSpec>& specs) {
  int ch = -1;
  for (const auto& s : specs) {
    const bool carries = s.kind == LayerKind::conv2d ||
                         s.kind == LayerKind::transposed_conv2d ||
                         s.kind == LayerKind::dense;
    if (carries) {
      if (ch >= 0 && s.c_in != ch)
        throw ConfigError("layer " + s.name + ": expects " + std::to_string(s.c_in) +
                          " input channels, gets " + std::to_string(ch));
      ch = s.c_out;
    }
  }
}

// ---------------------------------------------------------------------------
// ConvBlock

template <typename T>
ConvBlock<T>::ConvBlock(LayerSpec spec) : Layer<T>(std::move(spec)) {
  const auto& s = this->spec_;
  w_ = {"weight", Tensor<T>(1, s.k1 * s.k2, s.c_in, s.c_out),
        Tensor<T>(1, s.k1 * s.k2, s.c_in, s.c_out), true};
  b_ = {"bias", Tensor<T>(1, 1, 1, s.c_out), Tensor<T>(1, 1, 1, s.c_out), true};
  if (s.normalization == Norm::batch_norm) {
    gamma_ = {"bn_gamma", Tensor<T>(1, 1, 1, s.c_out), Tensor<T>(1, 1, 1, s.c_out), true};
    beta_ = {"bn_beta", Tensor<T>(1, 1, 1, s.c_out), Tensor<T>(1, 1, 1, s.c_out), true};
    run_mean_ = {"bn_running_mean", Tensor<T>(1, 1, 1, s.c_out), Tensor<T>(), false};
    run_var_ = {"bn_running_var", Tensor<T>(1, 1, 1, s.c_out), Tensor<T>(), false};
  }
}

template <typename T>
void ConvBlock<T>::init(Rng& rng) {
  const auto& s = this->spec_;
  init_uniform(w_.value, rng, 1.0 / std::sqrt(double(s.c_in) * s.k1 * s.k2));
  b_.value.zero();
  if (s.normalization == Norm::batch_norm) {
    gamma_.value.fill(T(1));
    beta_.value.zero();
    run_mean_.value.zero();
    run_var_.value.fill(T(1));
  }
}

template <typename T>
std::vector<Param<T>*> ConvBlock<T>::params() {
  std::vector<Param<T>*> p{&w_, &b_};
  if (this->spec_.normalization == Norm::batch_norm) {
    p.push_back(&gamma_);
    p.push_back(&beta_);
    p.push_back(&run_mean_);
    p.push_back(&run_var_);
  }
  return p;
}

template <typename T>
const Tensor<T>& ConvBlock<T>::forward(const Tensor<T>& x, bool training) {
  const auto& s = this->spec_;
  if (x.c() != s.c_in) throw DimensionError("conv " + s.name + ": channel mismatch");
  const int n = x.n(), h = x.h(), w = x.w();
  const int hw = h * w;
  const int k = s.c_in * s.k1 * s.k2;
  col_.ensure(n, hw, 1, k);
  y_.ensure(n, h, w, s.c_out);
  const bool bn = s.normalization == Norm::batch_norm;
  if (bn) {
    xhat_.ensure(n, h, w, s.c_out);
    inv_std_.resize(size_t(n) * s.c_out);
  }

  std::vector<double> mean(s.c_out), var(s.c_out);
  for (int ni = 0; ni < n; ++ni) {
    T* col = col_.sample(ni);
    im2col(x.sample(ni), h, w, s.c_in, s.k1, s.k2, col);
    T* y = y_.sample(ni);
    gemm(false, false, hw, s.c_out, k, T(1), col, k, w_.value.data(), s.c_out, T(0), y,
         s.c_out);
    const T* bias = b_.value.data();
    for (int p = 0; p < hw; ++p) {
      T* row = y + size_t(p) * s.c_out;
      for (int cc = 0; cc < s.c_out; ++cc) row[cc] += bias[cc];
    }

    if (bn) {
      // Per-sample statistics: this is batch norm at batch size 1.
      std::fill(mean.begin(), mean.end(), 0.0);
      std::fill(var.begin(), var.end(), 0.0);
      for (int p = 0; p < hw; ++p) {
        const T* row = y + size_t(p) * s.c_out;
        for (int cc = 0; cc < s.c_out; ++cc) mean[cc] += row[cc];
      }
      for (int cc = 0; cc < s.c_out; ++cc) mean[cc] /= hw;
      for (int p = 0; p < hw; ++p) {
        const T* row = y + size_t(p) * s.c_out;
        for (int cc = 0; cc < s.c_out; ++cc) {
          const double d = row[cc] - mean[cc];
          var[cc] += d * d;
        }
      }
      T* xh = xhat_.sample(ni);
      for (int cc = 0; cc < s.c_out; ++cc) {
        var[cc] /= hw;
        inv_std_[size_t(ni) * s.c_out + cc] = T(1.0 / std::sqrt(var[cc] + kBnEps));
        if (training) {
          run_mean_.value[cc] =
              T((1.0 - kBnMomentum) * run_mean_.value[cc] + kBnMomentum * mean[cc]);
          run_var_.value[cc] =
              T((1.0 - kBnMomentum) * run_var_.value[cc] + kBnMomentum * var[cc]);
        }
      }
      const T* gam = gamma_.value.data();
      const T* bet = beta_.value.data();
      const T* inv = inv_std_.data() + size_t(ni) * s.c_out;
      for (int p = 0; p < hw; ++p) {
        T* row = y + size_t(p) * s.c_out;
        T* xrow = xh + size_t(p) * s.c_out;
        for (int cc = 0; cc < s.c_out; ++cc) {
          const T v = T((row[cc] - mean[cc]) * inv[cc]);
          xrow[cc] = v;
          row[cc] = gam[cc] * v + bet[cc];
        }
      }
    }
    apply_activation(s.activation, y, size_t(hw) * s.c_out);
  }
  return y_;
}

template <typename T>
const Tensor<T>& ConvBlock<T>::backward(const Tensor<T>& gy, bool want_param_grads,
                                        bool want_input_grad) {
  const auto& s = this->spec_;
  const int n = y_.n(), h = y_.h(), w = y_.w();
  const int hw = h * w;
  const int k = s.c_in * s.k1 * s.k2;
  gbuf_.ensure(n, h, w, s.c_out);
  if (want_input_grad) {
    gcol_.ensure(1, hw, 1, k);
    gx_.ensure(n, h, w, s.c_in);
    gx_.zero();
  }

  std::vector<double> s1(s.c_out), s2(s.c_out), acc(s.c_out);
  for (int ni = 0; ni < n; ++ni) {
    T* g = gbuf_.sample(ni);
    activation_backward(s.activation, y_.sample(ni), gy.sample(ni), g,
                        size_t(hw) * s.c_out);

    if (s.normalization == Norm::batch_norm) {
      const T* xh = xhat_.sample(ni);
      const T* gam = gamma_.value.data();
      const T* inv = inv_std_.data() + size_t(ni) * s.c_out;
      // s1 = sum(g), s2 = sum(g * xhat); gamma is constant per channel, so
      // sum(dxhat) = gamma * s1 and sum(dxhat * xhat) = gamma * s2.
      std::fill(s1.begin(), s1.end(), 0.0);
      std::fill(s2.begin(), s2.end(), 0.0);
      for (int p = 0; p < hw; ++p) {
        const T* grow = g + size_t(p) * s.c_out;
        const T* xrow = xh + size_t(p) * s.c_out;
        for (int cc = 0; cc < s.c_out; ++cc) {
          s1[cc] += grow[cc];
          s2[cc] += double(grow[cc]) * xrow[cc];
        }
      }
      if (want_param_grads) {
        for (int cc = 0; cc < s.c_out; ++cc) {
          beta_.grad[cc] += T(s1[cc]);
          gamma_.grad[cc] += T(s2[cc]);
        }
        // The conv bias is cancelled by the per-sample mean subtraction;
        // its gradient is identically zero and it stays untouched.
      }
      for (int cc = 0; cc < s.c_out; ++cc) {
        s1[cc] *= double(gam[cc]) / hw;
        s2[cc] *= double(gam[cc]) / hw;
      }
      for (int p = 0; p < hw; ++p) {
        T* grow = g + size_t(p) * s.c_out;
        const T* xrow = xh + size_t(p) * s.c_out;
        for (int cc = 0; cc < s.c_out; ++cc) {
          const double dxh = double(grow[cc]) * gam[cc];
          grow[cc] = T(inv[cc] * (dxh - s1[cc] - double(xrow[cc]) * s2[cc]));
        }
      }
    }

    if (want_param_grads) {
      if (s.normalization != Norm::batch_norm) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int p = 0; p < hw; ++p) {
          const T* grow = g + size_t(p) * s.c_out;
          for (int cc = 0; cc < s.c_out; ++cc) acc[cc] += grow[cc];
        }
        for (int cc = 0; cc < s.c_out; ++cc) b_.grad[cc] += T(acc[cc]);
      }
      gemm(true, false, k, s.c_out, hw, T(1), col_.sample(ni), k, g, s.c_out, T(1),
           w_.grad.data(), s.c_out);
    }
    if (want_input_grad) {
      gemm(false, true, hw, k, s.c_out, T(1), g, s.c_out, w_.value.data(), s.c_out,
           T(0), gcol_.data(), k);
      col2im_acc(gcol_.data(), h, w, s.c_in, s.k1, s.k2, gx_.sample(ni));
    }
  }
  return gx_;
}

// ---------------------------------------------------------------------------
// ConvTranspose2d

template <typename T>
ConvTranspose2d<T>::ConvTranspose2d(LayerSpec spec) : Layer<T>(std::move(spec)) {
  const auto& s = this->spec_;
  w_ = {"weight", Tensor<T>(s.k1, s.k2, s.c_in, s.c_out),
        Tensor<T>(s.k1, s.k2, s.c_in, s.c_out), true};
  b_ = {"bias", Tensor<T>(1, 1, 1, s.c_out), Tensor<T>(1, 1, 1, s.c_out), true};
}

template <typename T>
void ConvTranspose2d<T>::init(Rng& rng) {
  const auto& s = this->spec_;
  init_uniform(w_.value, rng, 1.0 / std::sqrt(double(s.c_in) * s.k1 * s.k2));
  b_.value.zero();
}

template <typename T>
std::vector<Param<T>*> ConvTranspose2d<T>::params() {
  return {&w_, &b_};
}

template <typename T>
const Tensor<T>& ConvTranspose2d<T>::forward(const Tensor<T>& x, bool) {
  const auto& s = this->spec_;
  if (x.c() != s.c_in) throw DimensionError("convT " + s.name + ": channel mismatch");
  x_ = &x;
  const int n = x.n(), h = x.h(), w = x.w();
  const int hw = h * w;
  y_.ensure(n, h * 2, w * 2, s.c_out);
  tap_.resize(size_t(hw) * s.c_out);

  for (int ni = 0; ni < n; ++ni) {
    const T* xin = x.sample(ni);
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        // tap weight block is contiguous: (c_in x c_out) at (dy, dx)
        const T* wtap = w_.value.data() + (size_t(dy) * s.k2 + dx) * s.c_in * s.c_out;
        gemm(false, false, hw, s.c_out, s.c_in, T(1), xin, s.c_in, wtap, s.c_out, T(0),
             tap_.data(), s.c_out);
        const T* bias = b_.value.data();
        for (int y = 0; y < h; ++y) {
          const T* src = tap_.data() + size_t(y) * w * s.c_out;
          T* dst = y_.pixel(ni, 2 * y + dy, dx);
          for (int xx = 0; xx < w; ++xx) {
            T* out = dst + size_t(xx) * 2 * s.c_out;
            const T* in = src + size_t(xx) * s.c_out;
            for (int cc = 0; cc < s.c_out; ++cc) out[cc] = in[cc] + bias[cc];
          }
        }
      }
    }
  }
  return y_;
}

template <typename T>
const Tensor<T>& ConvTranspose2d<T>::backward(const Tensor<T>& gy, bool want_param_grads,
                                              bool want_input_grad) {
  const auto& s = this->spec_;
  const int n = x_->n(), h = x_->h(), w = x_->w();
  const int hw = h * w;
  gtap_.resize(size_t(hw) * s.c_out);
  if (want_input_grad) gx_.ensure(n, h, w, s.c_in);

  for (int ni = 0; ni < n; ++ni) {
    if (want_param_grads) {
      std::vector<double> db(s.c_out, 0.0);
      const T* gall = gy.sample(ni);
      const size_t total = size_t(h) * 2 * w * 2;
      for (size_t p = 0; p < total; ++p)
        for (int cc = 0; cc < s.c_out; ++cc) db[cc] += gall[p * s.c_out + cc];
      for (int cc = 0; cc < s.c_out; ++cc) b_.grad[cc] += T(db[cc]);
    }
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        for (int y = 0; y < h; ++y) {
          const T* src = gy.pixel(ni, 2 * y + dy, dx);
          T* dst = gtap_.data() + size_t(y) * w * s.c_out;
          for (int xx = 0; xx < w; ++xx)
            std::memcpy(dst + size_t(xx) * s.c_out, src + size_t(xx) * 2 * s.c_out,
                        sizeof(T) * s.c_out);
        }
        const size_t wofs = (size_t(dy) * s.k2 + dx) * s.c_in * s.c_out;
        if (want_param_grads)
          gemm(true, false, s.c_in, s.c_out, hw, T(1), x_->sample(ni), s.c_in,
               gtap_.data(), s.c_out, T(1), w_.grad.data() + wofs, s.c_out);
        if (want_input_grad) {
          const T beta = (dy == 0 && dx == 0) ? T(0) : T(1);
          gemm(false, true, hw, s.c_in, s.c_out, T(1), gtap_.data(), s.c_out,
               w_.value.data() + wofs, s.c_out, beta, gx_.sample(ni), s.c_in);
        }
      }
    }
  }
  return gx_;
}

// ---------------------------------------------------------------------------
// MaxPool2d

template <typename T>
const Tensor<T>& MaxPool2d<T>::forward(const Tensor<T>& x, bool) {
  const int n = x.n(), h = x.h(), w = x.w(), c = x.c();
  if (h % 2 || w % 2) throw DimensionError("max_pool2d: odd spatial size");
  in_h_ = h;
  in_w_ = w;
  y_.ensure(n, h / 2, w / 2, c);
  argmax_.resize(y_.size());
  for (int ni = 0; ni < n; ++ni)
    for (int y = 0; y < h / 2; ++y)
      for (int xx = 0; xx < w / 2; ++xx) {
        const T* p00 = x.pixel(ni, 2 * y, 2 * xx);
        const T* p01 = p00 + c;
        const T* p10 = x.pixel(ni, 2 * y + 1, 2 * xx);
        const T* p11 = p10 + c;
        T* out = y_.pixel(ni, y, xx);
        std::uint8_t* arg =
            argmax_.data() + (y_.pixel(ni, y, xx) - y_.data());
        for (int cc = 0; cc < c; ++cc) {
          T best = p00[cc];
          std::uint8_t a = 0;
          if (p01[cc] > best) { best = p01[cc]; a = 1; }
          if (p10[cc] > best) { best = p10[cc]; a = 2; }
          if (p11[cc] > best) { best = p11[cc]; a = 3; }
          out[cc] = best;
          arg[cc] = a;
        }
      }
  return y_;
}

template <typename T>
const Tensor<T>& MaxPool2d<T>::backward(const Tensor<T>& gy, bool, bool want_input_grad) {
  if (!want_input_grad) return gx_;
  const int n = y_.n(), oh = y_.h(), ow = y_.w(), c = y_.c();
  gx_.ensure(n, in_h_, in_w_, c);
  gx_.zero();
  for (int ni = 0; ni < n; ++ni)
    for (int y = 0; y < oh; ++y)
      for (int xx = 0; xx < ow; ++xx) {
        const T* grow = gy.pixel(ni, y, xx);
        const std::uint8_t* arg = argmax_.data() + (gy.pixel(ni, y, xx) - gy.data());
        for (int cc = 0; cc < c; ++cc) {
          const int a = arg[cc];
          gx_.at(ni, 2 * y + (a >> 1), 2 * xx + (a & 1), cc) += grow[cc];
        }
      }
  return gx_;
}

// ---------------------------------------------------------------------------
// GlobalMaxPool2d

template <typename T>
const Tensor<T>& GlobalMaxPool2d<T>::forward(const Tensor<T>& x, bool) {
  const int n = x.n(), h = x.h(), w = x.w(), c = x.c();
  in_h_ = h;
  in_w_ = w;
  y_.ensure(n, 1, 1, c);
  argmax_.resize(size_t(n) * c);
  const size_t hw = size_t(h) * w;
  for (int ni = 0; ni < n; ++ni) {
    const T* base = x.sample(ni);
    T* out = y_.sample(ni);
    std::int32_t* arg = argmax_.data() + size_t(ni) * c;
    for (int cc = 0; cc < c; ++cc) {
      out[cc] = base[cc];
      arg[cc] = 0;
    }
    for (size_t p = 1; p < hw; ++p) {
      const T* row = base + p * c;
      for (int cc = 0; cc < c; ++cc)
        if (row[cc] > out[cc]) {
          out[cc] = row[cc];
          arg[cc] = std::int32_t(p);
        }
    }
  }
  return y_;
}

template <typename T>
const Tensor<T>& GlobalMaxPool2d<T>::backward(const Tensor<T>& gy, bool,
                                              bool want_input_grad) {
  if (!want_input_grad) return gx_;
  const int n = y_.n(), c = y_.c();
  gx_.ensure(n, in_h_, in_w_, c);
  gx_.zero();
  for (int ni = 0; ni < n; ++ni) {
    const T* grow = gy.sample(ni);
    const std::int32_t* arg = argmax_.data() + size_t(ni) * c;
    T* base = gx_.sample(ni);
    for (int cc = 0; cc < c; ++cc) base[size_t(arg[cc]) * c + cc] += grow[cc];
  }
  return gx_;
}

// ---------------------------------------------------------------------------
// Dense

template <typename T>
Dense<T>::Dense(LayerSpec spec) : Layer<T>(std::move(spec)) {
  const auto& s = this->spec_;
  w_ = {"weight", Tensor<T>(1, 1, s.c_out, s.c_in), Tensor<T>(1, 1, s.c_out, s.c_in), true};
  b_ = {"bias", Tensor<T>(1, 1, 1, s.c_out), Tensor<T>(1, 1, 1, s.c_out), true};
}

template <typename T>
void Dense<T>::init(Rng& rng) {
  init_uniform(w_.value, rng, 1.0 / std::sqrt(double(this->spec_.c_in)));
  b_.value.zero();
}

template <typename T>
std::vector<Param<T>*> Dense<T>::params() {
  return {&w_, &b_};
}

template <typename T>
const Tensor<T>& Dense<T>::forward(const Tensor<T>& x, bool) {
  const auto& s = this->spec_;
  if (x.c() != s.c_in || x.h() != 1 || x.w() != 1)
    throw DimensionError("dense " + s.name + ": expects 1 x 1 x c_in input");
  x_ = &x;
  const int n = x.n();
  y_.ensure(n, 1, 1, s.c_out);
  for (int ni = 0; ni < n; ++ni) {
    const T* xin = x.sample(ni);
    T* out = y_.sample(ni);
    for (int co = 0; co < s.c_out; ++co) {
      double acc = b_.value[co];
      const T* wrow = w_.value.data() + size_t(co) * s.c_in;
      for (int ci = 0; ci < s.c_in; ++ci) acc += double(wrow[ci]) * xin[ci];
      out[co] = T(acc);
    }
  }
  return y_;
}

template <typename T>
const Tensor<T>& Dense<T>::backward(const Tensor<T>& gy, bool want_param_grads,
                                    bool want_input_grad) {
  const auto& s = this->spec_;
  const int n = y_.n();
  if (want_input_grad) {
    gx_.ensure(n, 1, 1, s.c_in);
    gx_.zero();
  }
  for (int ni = 0; ni < n; ++ni) {
    const T* xin = x_->sample(ni);
    const T* grow = gy.sample(ni);
    for (int co = 0; co < s.c_out; ++co) {
      const T g = grow[co];
      if (want_param_grads) {
        b_.grad[co] += g;
        T* wg = w_.grad.data() + size_t(co) * s.c_in;
        for (int ci = 0; ci < s.c_in; ++ci) wg[ci] += g * xin[ci];
      }
      if (want_input_grad) {
        T* gx = gx_.sample(ni);
        const T* wrow = w_.value.data() + size_t(co) * s.c_in;
        for (int ci = 0; ci < s.c_in; ++ci) gx[ci] += g * wrow[ci];
      }
    }
  }
  return gx_;
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
std::unique_ptr<Layer<T>> make_layer_impl(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::conv2d: return std::make_unique<ConvBlock<T>>(spec);
    case LayerKind::transposed_conv2d: return std::make_unique<ConvTranspose2d<T>>(spec);
    case LayerKind::max_pool2d: return std::make_unique<MaxPool2d<T>>(spec);
    case LayerKind::global_pool2d: return std::make_unique<GlobalMaxPool2d<T>>(spec);
    case LayerKind::dense: return std::make_unique<Dense<T>>(spec);
  }
  throw ConfigError("unknown layer kind");
}

}  // namespace

std::unique_ptr<Layer<float>> make_layer(const LayerSpec& spec, float) {
  return make_layer_impl<float>(spec);
}
std::unique_ptr<Layer<double>> make_layer(const LayerSpec& spec, double) {
  return make_layer_impl<double>(spec);
}

template class ConvBlock<float>;
template class ConvBlock<double>;
template class ConvTranspose2d<float>;
template class ConvTranspose2d<double>;
template class MaxPool2d<float>;
template class MaxPool2d<double>;
template class GlobalMaxPool2d<float>;
template class GlobalMaxPool2d<double>;
template class Dense<float>;
template class Dense<double>;

}  // namespace holo::nets
