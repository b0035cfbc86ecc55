#include "holo/objective.hpp"

#include <cmath>

#include "holo/errors.hpp"

namespace holo::objective {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double neg_log_sigmoid(double x) {
  // softplus(-x)
  if (x >= 0.0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

double neg_log_one_minus_sigmoid(double x) { return neg_log_sigmoid(-x); }

double d_neg_log_sigmoid(double x) { return -sigmoid(-x); }

double d_neg_log_one_minus_sigmoid(double x) { return sigmoid(x); }

template <typename T>
double mse_flat(const T* a, const T* b, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = double(a[i]) - double(b[i]);
    s += d * d;
  }
  return n ? s / double(n) : 0.0;
}

template <typename T>
void mse_grad_flat(const T* a, const T* b, size_t n, double scale, T* g) {
  if (!n) return;
  const double k = 2.0 * scale / double(n);
  for (size_t i = 0; i < n; ++i) g[i] += T(k * (double(b[i]) - double(a[i])));
}

template <typename T>
double tv_background(const Tensor<T>& field2ch, const Mask& mask) {
  const int h = field2ch.h(), w = field2ch.w();
  if (mask.height != h || mask.width != w)
    throw DimensionError("background TV: mask shape mismatch");
  if (field2ch.c() != 2) throw DimensionError("background TV: expects 2 channels");
  const size_t omega = mask.count();
  if (omega == 0) return 0.0;

  const T* z = field2ch.data();  // interleaved (re, im)
  double s = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask.at(y, x)) continue;
      const size_t i = (size_t(y) * w + x) * 2;
      for (int c = 0; c < 2; ++c) {
        const double v = z[i + c];
        if (x + 1 < w) {
          const double d = double(z[i + 2 + c]) - v;
          s += d * d;
        }
        if (y + 1 < h) {
          const double d = double(z[i + size_t(w) * 2 + c]) - v;
          s += d * d;
        }
      }
    }
  return s / double(omega);
}

template <typename T>
void tv_background_grad(const Tensor<T>& field2ch, const Mask& mask, double scale,
                        Tensor<T>& grad_acc) {
  const int h = field2ch.h(), w = field2ch.w();
  if (mask.height != h || mask.width != w)
    throw DimensionError("background TV: mask shape mismatch");
  const size_t omega = mask.count();
  if (omega == 0) return;
  const double k = 2.0 * scale / double(omega);

  const T* z = field2ch.data();
  T* g = grad_acc.data();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask.at(y, x)) continue;
      const size_t i = (size_t(y) * w + x) * 2;
      for (int c = 0; c < 2; ++c) {
        if (x + 1 < w) {
          const double d = double(z[i + 2 + c]) - double(z[i + c]);
          g[i + c] -= T(k * d);
          g[i + 2 + c] += T(k * d);
        }
        if (y + 1 < h) {
          const double d = double(z[i + size_t(w) * 2 + c]) - double(z[i + c]);
          g[i + c] -= T(k * d);
          g[i + size_t(w) * 2 + c] += T(k * d);
        }
      }
    }
}

template double mse_flat<float>(const float*, const float*, size_t);
template double mse_flat<double>(const double*, const double*, size_t);
template void mse_grad_flat<float>(const float*, const float*, size_t, double, float*);
template void mse_grad_flat<double>(const double*, const double*, size_t, double, double*);
template double tv_background<float>(const Tensor<float>&, const Mask&);
template double tv_background<double>(const Tensor<double>&, const Mask&);
template void tv_background_grad<float>(const Tensor<float>&, const Mask&, double,
                                        Tensor<float>&);
template void tv_background_grad<double>(const Tensor<double>&, const Mask&, double,
                                         Tensor<double>&);

double loss_autoencoder(const Hologram& h, const Hologram& hhat) {
  if (h.height != hhat.height || h.width != hhat.width)
    throw DimensionError("loss_autoencoder: shape mismatch");
  return mse_flat(h.values.data(), hhat.values.data(), h.values.size());
}

double loss_background_tv(const ComplexField& field, const Mask& mask) {
  Tensor<double> t(1, field.height, field.width, 2);
  for (size_t i = 0; i < field.size(); ++i) {
    t[i * 2] = field.re[i];
    t[i * 2 + 1] = field.im[i];
  }
  return tv_background(t, mask);
}

double loss_generator(double d_score_fake, const Hologram& h, const Hologram& hhat,
                      const ComplexField& field, const Mask& mask,
                      const LossWeights& w) {
  return neg_log_sigmoid(d_score_fake) + w.lambda1 * loss_autoencoder(h, hhat) +
         w.lambda2 * loss_background_tv(field, mask);
}

double loss_discriminator(double d_score_real, double d_score_fake) {
  return neg_log_sigmoid(d_score_real) + neg_log_one_minus_sigmoid(d_score_fake);
}

}  // namespace holo::objective
