#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include "holo/errors.hpp"

namespace holo {

/// h x w complex-valued 2D field stored as separate real/imaginary planes.
struct ComplexField {
  int height = 0;
  int width = 0;
  std::vector<double> re;
  std::vector<double> im;

  ComplexField() = default;
  ComplexField(int h, int w)
      : height(h), width(w), re(size_t(h) * w, 0.0), im(size_t(h) * w, 0.0) {}

  size_t size() const { return re.size(); }

  std::complex<double> at(int y, int x) const {
    const size_t i = size_t(y) * width + x;
    return {re[i], im[i]};
  }
  void set(int y, int x, std::complex<double> v) {
    const size_t i = size_t(y) * width + x;
    re[i] = v.real();
    im[i] = v.imag();
  }

  std::vector<double> amplitude() const {
    std::vector<double> a(size());
    for (size_t i = 0; i < size(); ++i) a[i] = std::hypot(re[i], im[i]);
    return a;
  }
  /// Principal-value phase in (-pi, pi].
  std::vector<double> phase() const {
    std::vector<double> p(size());
    for (size_t i = 0; i < size(); ++i) {
      double v = std::atan2(im[i], re[i]);
      if (v <= -3.14159265358979323846) v = 3.14159265358979323846;
      p[i] = v;
    }
    return p;
  }
  double norm2() const {
    double s = 0.0;
    for (size_t i = 0; i < size(); ++i) s += re[i] * re[i] + im[i] * im[i];
    return std::sqrt(s);
  }
  bool all_finite() const {
    for (size_t i = 0; i < size(); ++i)
      if (!std::isfinite(re[i]) || !std::isfinite(im[i])) return false;
    return true;
  }
};

enum class HologramScale { raw_counts, normalized };

/// h x w real non-negative intensity image.
struct Hologram {
  int height = 0;
  int width = 0;
  std::vector<double> values;
  HologramScale scale = HologramScale::raw_counts;

  Hologram() = default;
  Hologram(int h, int w) : height(h), width(w), values(size_t(h) * w, 0.0) {}

  double mean() const {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / double(values.size());
  }

  /// Divides by the mean so the background intensity sits near 1.
  void normalize() {
    const double m = mean();
    if (m > 0.0) {
      for (double& v : values) v /= m;
    }
    scale = HologramScale::normalized;
  }
};

/// "HCF1" binary field file: magic, u32 LE height, u32 LE width, then
/// row-major interleaved (re, im) f32 LE pairs.
void save_hcf(const ComplexField& field, const std::filesystem::path& path);
ComplexField load_hcf(const std::filesystem::path& path);

}  // namespace holo
