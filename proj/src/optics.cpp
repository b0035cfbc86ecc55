#include "holo/optics.hpp"

#include <algorithm>
#include <cmath>

#include "holo/fft.hpp"
#include "holo/image_io.hpp"
#include "holo/rng.hpp"

namespace holo {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;
}  // namespace

void OpticsConfig::validate() const {
  if (!(wavelength_um > 0.0)) throw ConfigError("wavelength_um must be > 0");
  if (!(pixel_um > 0.0)) throw ConfigError("pixel_um must be > 0");
  if (height <= 0 || width <= 0) throw ConfigError("grid size must be positive");
  if (!std::isfinite(z_um)) throw ConfigError("z_um must be finite");
}

ComplexField ObjectTransmittance::to_field() const {
  ComplexField f(height, width);
  for (size_t i = 0; i < attenuation.size(); ++i) {
    f.re[i] = attenuation[i] * std::cos(phase_shift[i]);
    f.im[i] = attenuation[i] * std::sin(phase_shift[i]);
  }
  return f;
}

namespace optics {

namespace {

// Standard FFT frequency layout: k -> k/(n*pitch) for k < n/2, negative
// frequencies in the upper half (Nyquist mapped negative for even n).
inline double fft_freq(int k, int n, double pitch_um) {
  const int half = (n - 1) / 2;
  const int kk = k <= half ? k : k - n;
  return double(kk) / (double(n) * pitch_um);
}

}  // namespace

TransferFunction transfer_function(const OpticsConfig& cfg, double z_um) {
  cfg.validate();
  TransferFunction tf;
  tf.height = cfg.height;
  tf.width = cfg.width;
  tf.values.resize(size_t(cfg.height) * cfg.width);
  tf.evanescent_mask.assign(tf.values.size(), 0);

  const double lambda = cfg.wavelength_um;
  for (int y = 0; y < cfg.height; ++y) {
    const double fy = fft_freq(y, cfg.height, cfg.pixel_um);
    const double ly2 = (lambda * fy) * (lambda * fy);
    for (int x = 0; x < cfg.width; ++x) {
      const double fx = fft_freq(x, cfg.width, cfg.pixel_um);
      const double arg = 1.0 - (lambda * fx) * (lambda * fx) - ly2;
      const size_t i = size_t(y) * cfg.width + x;
      if (arg < 0.0) {
        tf.values[i] = {0.0, 0.0};
        tf.evanescent_mask[i] = 1;
      } else {
        const double phase = kTwoPi * z_um / lambda * std::sqrt(arg);
        tf.values[i] = {std::cos(phase), std::sin(phase)};
      }
    }
  }
  return tf;
}

ComplexField propagate(const ComplexField& field, const OpticsConfig& cfg, double z_um) {
  if (field.height != cfg.height || field.width != cfg.width)
    throw DimensionError("propagate: field shape does not match config grid");
  const TransferFunction tf = transfer_function(cfg, z_um);

  std::vector<std::complex<double>> buf(field.size());
  for (size_t i = 0; i < field.size(); ++i) buf[i] = {field.re[i], field.im[i]};
  fft::forward(buf.data(), field.height, field.width);
  for (size_t i = 0; i < buf.size(); ++i) buf[i] *= tf.values[i];
  fft::inverse(buf.data(), field.height, field.width);

  ComplexField out(field.height, field.width);
  for (size_t i = 0; i < buf.size(); ++i) {
    out.re[i] = buf[i].real();
    out.im[i] = buf[i].imag();
  }
  return out;
}

Hologram form_hologram(const ObjectTransmittance& t, const OpticsConfig& cfg) {
  if (t.height != cfg.height || t.width != cfg.width)
    throw DimensionError("form_hologram: target shape does not match config grid");
  const ComplexField sensor = propagate(t.to_field(), cfg, cfg.z_um);
  Hologram h(t.height, t.width);
  for (size_t i = 0; i < h.values.size(); ++i) {
    const double v = sensor.re[i] * sensor.re[i] + sensor.im[i] * sensor.im[i];
    h.values[i] = v < 0.0 ? 0.0 : v;
  }
  h.normalize();
  return h;
}

ComplexField back_propagate(const Hologram& h, const OpticsConfig& cfg, bool sqrt_input) {
  ComplexField f(h.height, h.width);
  for (size_t i = 0; i < h.values.size(); ++i) {
    const double v = h.values[i] < 0.0 ? 0.0 : h.values[i];
    f.re[i] = sqrt_input ? std::sqrt(v) : v;
  }
  return propagate(f, cfg, -cfg.z_um);
}

Hologram add_noise(const Hologram& h, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw ParamError("noise sigma must be >= 0");
  if (sigma == 0.0) return h;

  const double vmax = *std::max_element(h.values.begin(), h.values.end());
  Hologram out = h;
  if (vmax <= 0.0) return out;

  // Work on the 8-bit-style scale the sigma convention refers to.
  const double up = 255.0 / vmax;
  Rng rng(Rng::derive(seed, 0x6e6f697365ULL));
  for (double& v : out.values) {
    double s = v * up + sigma * rng.normal();
    s = std::clamp(s, 0.0, 255.0);
    v = s / up;
  }
  out.normalize();
  return out;
}

namespace {

using Pattern = std::vector<std::uint8_t>;  // 1 = foreground

void fill_rect(Pattern& p, int h, int w, int y0, int x0, int y1, int x1) {
  y0 = std::max(0, y0);
  x0 = std::max(0, x0);
  y1 = std::min(h, y1);
  x1 = std::min(w, x1);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) p[size_t(y) * w + x] = 1;
}

// One USAF-style element: three horizontal bars and three vertical bars,
// bar aspect 5:1, gaps equal to the bar width.
void tri_bar_group(Pattern& p, int h, int w, int y, int x, int bar) {
  const int len = 5 * bar;
  for (int k = 0; k < 3; ++k)
    fill_rect(p, h, w, y + k * 2 * bar, x, y + k * 2 * bar + bar, x + len);
  const int xv = x + len + 2 * bar;
  for (int k = 0; k < 3; ++k)
    fill_rect(p, h, w, y, xv + k * 2 * bar, y + len, xv + k * 2 * bar + bar);
}

Pattern make_usaf(int h, int w) {
  Pattern p(size_t(h) * w, 0);
  const int m = std::min(h, w);
  const int b1 = std::max(2, m / 18);
  const int b2 = std::max(2, m / 28);
  const int b3 = std::max(1, m / 44);
  const int b4 = std::max(1, m / 64);
  tri_bar_group(p, h, w, h / 12, w / 12, b1);
  tri_bar_group(p, h, w, h / 2 + h / 12, w / 12, b2);
  tri_bar_group(p, h, w, h / 12, w / 2 + w / 10, b3);
  tri_bar_group(p, h, w, h / 2 + h / 8, w / 2 + w / 8, b4);
  // the solid reference square
  fill_rect(p, h, w, h / 2 - m / 20, w / 2 - m / 20, h / 2 + m / 20, w / 2 + m / 20);
  return p;
}

Pattern make_disc(int h, int w, double radius) {
  Pattern p(size_t(h) * w, 0);
  if (radius <= 0.0) return p;
  const double cy = (h - 1) / 2.0;
  const double cx = (w - 1) / 2.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= radius * radius)
        p[size_t(y) * w + x] = 1;
  return p;
}

// 5x7 block glyphs, enough for the built-in caption.
const char* glyph(char c) {
  switch (c) {
    case 'H': return "10001100011000111111100011000110001";
    case 'O': return "01110100011000110001100011000101110";
    case 'L': return "10000100001000010000100001000011111";
    default: return nullptr;
  }
}

Pattern make_text(int h, int w) {
  Pattern p(size_t(h) * w, 0);
  const std::string text = "HOLO";
  const int cols = int(text.size()) * 6 - 1;
  const int rows = 7;
  const int cell = std::max(1, std::min(w * 7 / (10 * cols), h * 7 / (10 * rows)));
  const int x0 = (w - cols * cell) / 2;
  const int y0 = (h - rows * cell) / 2;
  for (size_t ci = 0; ci < text.size(); ++ci) {
    const char* g = glyph(text[ci]);
    if (!g) continue;
    for (int gy = 0; gy < 7; ++gy)
      for (int gx = 0; gx < 5; ++gx)
        if (g[gy * 5 + gx] == '1') {
          const int y = y0 + gy * cell;
          const int x = x0 + (int(ci) * 6 + gx) * cell;
          fill_rect(p, h, w, y, x, y + cell, x + cell);
        }
  }
  return p;
}

void stamp_disc(Pattern& p, int h, int w, double cy, double cx, double r) {
  const int y0 = std::max(0, int(std::floor(cy - r)));
  const int y1 = std::min(h - 1, int(std::ceil(cy + r)));
  const int x0 = std::max(0, int(std::floor(cx - r)));
  const int x1 = std::min(w - 1, int(std::ceil(cx + r)));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if ((y - cy) * (y - cy) + (x - cx) * (x - cx) <= r * r) p[size_t(y) * w + x] = 1;
}

Pattern make_cell_like(int h, int w, std::uint64_t seed) {
  Pattern p(size_t(h) * w, 0);
  Rng rng(Rng::derive(seed, 0x63656c6cULL));
  const double m = std::min(h, w);
  const int blobs = 6 + int(rng.uniform() * 5.0);
  for (int b = 0; b < blobs; ++b) {
    const double cy = rng.uniform(0.15, 0.85) * h;
    const double cx = rng.uniform(0.15, 0.85) * w;
    const double ry = rng.uniform(0.045, 0.11) * m;
    const double rx = rng.uniform(0.045, 0.11) * m;
    const double th = rng.uniform(0.0, kPi);
    const double ct = std::cos(th), st = std::sin(th);
    const int y0 = std::max(0, int(cy - ry - rx)), y1 = std::min(h - 1, int(cy + ry + rx));
    const int x0 = std::max(0, int(cx - ry - rx)), x1 = std::min(w - 1, int(cx + ry + rx));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double u = (x - cx) * ct + (y - cy) * st;
        const double v = -(x - cx) * st + (y - cy) * ct;
        if ((u * u) / (rx * rx) + (v * v) / (ry * ry) <= 1.0) p[size_t(y) * w + x] = 1;
      }
  }
  return p;
}

void draw_branch(Pattern& p, int h, int w, Rng& rng, double y, double x, double angle,
                 double len, double thick, int depth) {
  if (depth <= 0 || len < 1.5) return;
  const double ny = y + len * std::sin(angle);
  const double nx = x + len * std::cos(angle);
  const int steps = std::max(2, int(len * 2));
  for (int s = 0; s <= steps; ++s) {
    const double t = double(s) / steps;
    stamp_disc(p, h, w, y + (ny - y) * t, x + (nx - x) * t, thick * 0.5);
  }
  const int kids = 2;
  for (int k = 0; k < kids; ++k) {
    const double spread = rng.uniform(0.35, 0.9) * (k == 0 ? 1.0 : -1.0);
    draw_branch(p, h, w, rng, ny, nx, angle + spread, len * rng.uniform(0.55, 0.72),
                std::max(1.0, thick * 0.75), depth - 1);
  }
}

Pattern make_dendrite_like(int h, int w, std::uint64_t seed) {
  Pattern p(size_t(h) * w, 0);
  Rng rng(Rng::derive(seed, 0x64656e64ULL));
  const double m = std::min(h, w);
  const int arms = 4 + int(rng.uniform() * 3.0);
  for (int a = 0; a < arms; ++a) {
    const double angle = kTwoPi * (a + rng.uniform(-0.15, 0.15)) / arms;
    draw_branch(p, h, w, rng, h / 2.0, w / 2.0, angle, 0.22 * m,
                std::max(1.5, 0.018 * m), 5);
  }
  return p;
}

Pattern make_from_bitmap(const std::filesystem::path& path, int& h, int& w) {
  const io::GrayImage img = io::read_gray(path);  // throws IoError when unreadable
  h = img.height;
  w = img.width;
  Pattern p(size_t(h) * w, 0);
  const double half = img.max_value() / 2.0;
  for (size_t i = 0; i < p.size(); ++i) p[i] = img.pixels[i] >= half ? 1 : 0;
  return p;
}

}  // namespace

TargetKind target_kind_from_name(const std::string& name) {
  if (name == "usaf" || name == "usaf_bars") return TargetKind::usaf_bars;
  if (name == "disc") return TargetKind::disc;
  if (name == "text") return TargetKind::text;
  if (name == "bitmap") return TargetKind::bitmap;
  if (name == "cell" || name == "cell_like") return TargetKind::cell_like;
  if (name == "dendrite" || name == "dendrite_like") return TargetKind::dendrite_like;
  throw ParamError("unknown target pattern: " + name);
}

ObjectTransmittance synthesize_target(const TargetSpec& spec) {
  int h = spec.height;
  int w = spec.width;
  if ((h <= 0 || w <= 0) && spec.kind != TargetKind::bitmap)
    throw ParamError("target size must be positive");
  if (spec.attenuation < 0.0 || spec.attenuation > 1.0)
    throw ParamError("target attenuation must lie in [0, 1]");

  Pattern pat;
  switch (spec.kind) {
    case TargetKind::usaf_bars: pat = make_usaf(h, w); break;
    case TargetKind::disc: pat = make_disc(h, w, spec.disc_radius); break;
    case TargetKind::text: pat = make_text(h, w); break;
    case TargetKind::cell_like: pat = make_cell_like(h, w, spec.seed); break;
    case TargetKind::dendrite_like: pat = make_dendrite_like(h, w, spec.seed); break;
    case TargetKind::bitmap: pat = make_from_bitmap(spec.bitmap_path, h, w); break;
  }

  ObjectTransmittance t;
  t.height = h;
  t.width = w;
  t.attenuation.resize(pat.size());
  t.phase_shift.resize(pat.size());
  t.truth_mask.resize(pat.size());
  for (size_t i = 0; i < pat.size(); ++i) {
    t.attenuation[i] = pat[i] ? spec.attenuation : 1.0;
    t.phase_shift[i] = pat[i] ? spec.phase_rad : 0.0;
    t.truth_mask[i] = pat[i] ? 0 : 1;
  }
  return t;
}

double evanescent_fraction(const OpticsConfig& cfg) {
  const TransferFunction tf = transfer_function(cfg, cfg.z_um);
  return double(tf.evanescent_count()) / double(tf.values.size());
}

}  // namespace optics

void save_hologram(const Hologram& h, const std::filesystem::path& path, int bit_depth) {
  const double vmax = h.values.empty()
                          ? 0.0
                          : *std::max_element(h.values.begin(), h.values.end());
  std::vector<double> unit(h.values.size(), 0.0);
  if (vmax > 0.0)
    for (size_t i = 0; i < unit.size(); ++i)
      unit[i] = std::max(0.0, h.values[i]) / vmax;
  io::write_gray(path, bit_depth == 8 ? io::quantize8(unit, h.height, h.width)
                                      : io::quantize16(unit, h.height, h.width));
}

Hologram load_hologram(const std::filesystem::path& path) {
  const io::GrayImage img = io::read_gray(path);
  Hologram h(img.height, img.width);
  const double maxv = img.max_value();
  for (size_t i = 0; i < h.values.size(); ++i) h.values[i] = img.pixels[i] / maxv;
  h.normalize();
  return h;
}

}  // namespace holo
