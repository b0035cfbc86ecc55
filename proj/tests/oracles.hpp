// Independent brute-force oracles used by the test suites. Everything here
// is deliberately written as plain double loops against the definitions, so
// it shares no code path with the implementations it checks.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "holo/field.hpp"
#include "holo/mask.hpp"
#include "holo/optics.hpp"

namespace oracle {

constexpr double kPi = 3.14159265358979323846;

// Angular-spectrum propagation evaluated with explicit DFT sums (O(N^4)):
// forward DFT, analytic transfer factor, inverse DFT. Keeps its own
// frequency-layout and normalization conventions.
inline holo::ComplexField propagate_direct(const holo::ComplexField& f,
                                           const holo::OpticsConfig& cfg, double z_um) {
  const int h = f.height, w = f.width;
  std::vector<std::complex<double>> spectrum(size_t(h) * w);
  for (int k = 0; k < h; ++k)
    for (int l = 0; l < w; ++l) {
      std::complex<double> acc(0.0, 0.0);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double ang = -2.0 * kPi * (double(k) * y / h + double(l) * x / w);
          acc += std::complex<double>(f.re[size_t(y) * w + x], f.im[size_t(y) * w + x]) *
                 std::complex<double>(std::cos(ang), std::sin(ang));
        }
      spectrum[size_t(k) * w + l] = acc;
    }

  for (int k = 0; k < h; ++k)
    for (int l = 0; l < w; ++l) {
      const int kk = k <= (h - 1) / 2 ? k : k - h;
      const int ll = l <= (w - 1) / 2 ? l : l - w;
      const double fy = double(kk) / (double(h) * cfg.pixel_um);
      const double fx = double(ll) / (double(w) * cfg.pixel_um);
      const double arg = 1.0 - cfg.wavelength_um * cfg.wavelength_um * (fx * fx + fy * fy);
      std::complex<double> p(0.0, 0.0);
      if (arg >= 0.0) {
        const double phase = 2.0 * kPi * z_um / cfg.wavelength_um * std::sqrt(arg);
        p = {std::cos(phase), std::sin(phase)};
      }
      spectrum[size_t(k) * w + l] *= p;
    }

  holo::ComplexField out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::complex<double> acc(0.0, 0.0);
      for (int k = 0; k < h; ++k)
        for (int l = 0; l < w; ++l) {
          const double ang = 2.0 * kPi * (double(k) * y / h + double(l) * x / w);
          acc += spectrum[size_t(k) * w + l] *
                 std::complex<double>(std::cos(ang), std::sin(ang));
        }
      acc /= double(h) * double(w);
      out.re[size_t(y) * w + x] = acc.real();
      out.im[size_t(y) * w + x] = acc.imag();
    }
  return out;
}

inline double rel_l2_error(const holo::ComplexField& a, const holo::ComplexField& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.re.size(); ++i) {
    const double dr = a.re[i] - b.re[i];
    const double di = a.im[i] - b.im[i];
    num += dr * dr + di * di;
    den += b.re[i] * b.re[i] + b.im[i] * b.im[i];
  }
  return std::sqrt(num / (den > 0 ? den : 1.0));
}

inline double mse_loops(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / double(a.size());
}

inline double masked_mse_loops(const std::vector<double>& a, const std::vector<double>& b,
                               const std::vector<std::uint8_t>& mask) {
  double s = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!mask[i]) continue;
    s += (a[i] - b[i]) * (a[i] - b[i]);
    ++n;
  }
  return n ? s / double(n) : 0.0;
}

// Eq.-style squared-difference background TV with skipped border terms.
inline double tv_loops(const std::vector<double>& re, const std::vector<double>& im,
                       const holo::Mask& mask) {
  const int h = mask.height, w = mask.width;
  double s = 0.0;
  size_t omega = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask.at(y, x)) continue;
      ++omega;
      const size_t i = size_t(y) * w + x;
      if (x + 1 < w) {
        s += (re[i + 1] - re[i]) * (re[i + 1] - re[i]);
        s += (im[i + 1] - im[i]) * (im[i + 1] - im[i]);
      }
      if (y + 1 < h) {
        s += (re[i + w] - re[i]) * (re[i + w] - re[i]);
        s += (im[i + w] - im[i]) * (im[i + w] - im[i]);
      }
    }
  return omega ? s / double(omega) : 0.0;
}

// Exhaustive threshold sweep minimizing within-class variance (Otsu-style).
inline std::vector<std::uint8_t> threshold_sweep_labels(const std::vector<double>& v) {
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end());
  double best_score = 1e300;
  double best_t = sorted.front();
  for (size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double t = 0.5 * (sorted[i] + sorted[i + 1]);
    if (t <= sorted[i]) continue;
    double s0 = 0, s1 = 0, q0 = 0, q1 = 0;
    size_t n0 = 0, n1 = 0;
    for (double x : v) {
      if (x <= t) {
        s0 += x;
        q0 += x * x;
        ++n0;
      } else {
        s1 += x;
        q1 += x * x;
        ++n1;
      }
    }
    if (!n0 || !n1) continue;
    const double var0 = q0 - s0 * s0 / double(n0);
    const double var1 = q1 - s1 * s1 / double(n1);
    if (var0 + var1 < best_score) {
      best_score = var0 + var1;
      best_t = t;
    }
  }
  std::vector<std::uint8_t> labels(v.size());
  for (size_t i = 0; i < v.size(); ++i) labels[i] = v[i] > best_t ? 1 : 0;
  return labels;
}

inline double psnr_loops(const std::vector<double>& a, const std::vector<double>& b) {
  double mse = 0.0;
  for (size_t i = 0; i < a.size(); ++i) mse += (a[i] - b[i]) * (a[i] - b[i]);
  mse /= double(a.size());
  if (mse <= 0.0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

}  // namespace oracle
