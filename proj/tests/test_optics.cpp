#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "holo/fft.hpp"
#include "holo/image_io.hpp"
#include "holo/optics.hpp"
#include "holo/rng.hpp"
#include "oracles.hpp"

using namespace holo;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

OpticsConfig paper_optics(int h, int w) {
  OpticsConfig cfg;
  cfg.wavelength_um = 0.532;
  cfg.pixel_um = 2.0;
  cfg.z_um = 5500.0;
  cfg.height = h;
  cfg.width = w;
  return cfg;
}

ComplexField random_field(int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  ComplexField f(h, w);
  for (size_t i = 0; i < f.size(); ++i) {
    f.re[i] = rng.uniform(-1.0, 1.0);
    f.im[i] = rng.uniform(-1.0, 1.0);
  }
  return f;
}

double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.re[i] - b.re[i]));
    m = std::max(m, std::abs(a.im[i] - b.im[i]));
  }
  return m;
}

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "holo_optics_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("transfer function at DC and z=0") {
  auto cfg = paper_optics(16, 16);
  const auto tf = optics::transfer_function(cfg, cfg.z_um);
  // DC entry: exp(2*pi*j*z/lambda)
  const double phase = 2.0 * kPi * cfg.z_um / cfg.wavelength_um;
  CHECK(tf.values[0].real() == doctest::Approx(std::cos(phase)).epsilon(1e-12));
  CHECK(tf.values[0].imag() == doctest::Approx(std::sin(phase)).epsilon(1e-12));
  CHECK(std::abs(std::abs(tf.values[0]) - 1.0) < 1e-12);

  const auto tf0 = optics::transfer_function(cfg, 0.0);
  for (size_t i = 0; i < tf0.values.size(); ++i) {
    if (tf0.evanescent_mask[i]) continue;
    CHECK(tf0.values[i].real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(tf0.values[i].imag()) < 1e-12);
  }
}

TEST_CASE("paper optics config has an empty evanescent band") {
  // lambda * f_max = 0.532/(2*2) = 0.133 << 1
  auto cfg = paper_optics(64, 64);
  CHECK(optics::evanescent_fraction(cfg) == 0.0);
}

TEST_CASE("coarse pitch produces a computable evanescent fraction") {
  OpticsConfig cfg = paper_optics(32, 32);
  cfg.wavelength_um = 3.0;  // lambda > 2*pitch: corners of the grid are evanescent
  const double frac = optics::evanescent_fraction(cfg);
  CHECK(frac > 0.0);
  CHECK(frac < 1.0);
}

TEST_CASE("config validation") {
  OpticsConfig cfg = paper_optics(8, 8);
  cfg.wavelength_um = 0.0;
  CHECK_THROWS_AS(optics::transfer_function(cfg, 10.0), ConfigError);
  cfg = paper_optics(8, 8);
  cfg.pixel_um = -1.0;
  CHECK_THROWS_AS(optics::transfer_function(cfg, 10.0), ConfigError);
}

TEST_CASE("propagate: z=0 is the identity and shapes are checked") {
  auto cfg = paper_optics(32, 24);
  const auto f = random_field(32, 24, 7);
  const auto g = optics::propagate(f, cfg, 0.0);
  CHECK(max_abs_diff(f, g) < 1e-6);

  const auto bad = random_field(16, 16, 1);
  CHECK_THROWS_AS(optics::propagate(bad, cfg, 100.0), DimensionError);
}

TEST_CASE("propagate: constant field stays a plane wave") {
  auto cfg = paper_optics(32, 32);
  ComplexField f(32, 32);
  for (auto& v : f.re) v = 1.0;
  const auto g = optics::propagate(f, cfg, cfg.z_um);
  for (size_t i = 0; i < g.size(); ++i)
    CHECK(std::hypot(g.re[i], g.im[i]) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("propagate: round trip, unitarity, composition") {
  auto cfg = paper_optics(64, 64);
  const auto f = random_field(64, 64, 42);

  const auto fwd = optics::propagate(f, cfg, 5500.0);
  const auto back = optics::propagate(fwd, cfg, -5500.0);
  CHECK(oracle::rel_l2_error(back, f) < 1e-5);
  CHECK(max_abs_diff(back, f) < 1e-5);

  CHECK(fwd.norm2() == doctest::Approx(f.norm2()).epsilon(1e-6));

  const auto two_step =
      optics::propagate(optics::propagate(f, cfg, 2500.0), cfg, 3000.0);
  CHECK(max_abs_diff(two_step, fwd) < 1e-5);
}

TEST_CASE("propagate matches the direct-DFT brute-force oracle") {
  for (int n : {16, 32}) {
    auto cfg = paper_optics(n, n);
    const auto f = random_field(n, n, 100 + n);
    const auto fast = optics::propagate(f, cfg, cfg.z_um);
    const auto direct = oracle::propagate_direct(f, cfg, cfg.z_um);
    CHECK(oracle::rel_l2_error(fast, direct) < 1e-3);
  }
}

TEST_CASE("form_hologram: empty slide gives unit intensity") {
  auto cfg = paper_optics(32, 32);
  optics::TargetSpec spec;
  spec.kind = optics::TargetKind::disc;
  spec.height = spec.width = 32;
  spec.disc_radius = 0.0;
  const auto t = optics::synthesize_target(spec);
  const auto h = optics::form_hologram(t, cfg);
  CHECK(h.scale == HologramScale::normalized);
  for (double v : h.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("form_hologram: pure-amplitude target at z=0 reproduces attenuation^2") {
  auto cfg = paper_optics(32, 32);
  cfg.z_um = 0.0;
  optics::TargetSpec spec;
  spec.kind = optics::TargetKind::disc;
  spec.height = spec.width = 32;
  spec.disc_radius = 6.0;
  spec.attenuation = 0.5;
  spec.phase_rad = 0.0;
  const auto t = optics::synthesize_target(spec);
  auto h = optics::form_hologram(t, cfg);
  // undo the mean normalization to compare raw intensities
  double mean = 0.0;
  for (size_t i = 0; i < t.attenuation.size(); ++i)
    mean += t.attenuation[i] * t.attenuation[i];
  mean /= double(t.attenuation.size());
  for (size_t i = 0; i < h.values.size(); ++i)
    CHECK(h.values[i] * mean ==
          doctest::Approx(t.attenuation[i] * t.attenuation[i]).epsilon(1e-6));
}

TEST_CASE("form_hologram vs direct oracle on a 32x32 phase target") {
  auto cfg = paper_optics(32, 32);
  optics::TargetSpec spec;
  spec.kind = optics::TargetKind::disc;
  spec.height = spec.width = 32;
  spec.disc_radius = 5.0;
  const auto t = optics::synthesize_target(spec);
  const auto h = optics::form_hologram(t, cfg);

  const auto sensor = oracle::propagate_direct(t.to_field(), cfg, cfg.z_um);
  std::vector<double> want(sensor.size());
  double mean = 0.0;
  for (size_t i = 0; i < sensor.size(); ++i) {
    want[i] = sensor.re[i] * sensor.re[i] + sensor.im[i] * sensor.im[i];
    mean += want[i];
  }
  mean /= double(want.size());
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < want.size(); ++i) {
    want[i] /= mean;
    num += (h.values[i] - want[i]) * (h.values[i] - want[i]);
    den += want[i] * want[i];
  }
  CHECK(std::sqrt(num / den) < 1e-3);
  // fringes exist: the hologram is not flat
  double vmin = 1e9, vmax = -1e9;
  for (double v : h.values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  CHECK(vmax - vmin > 0.05);
}

TEST_CASE("back_propagate: DC hologram and round trip") {
  auto cfg = paper_optics(32, 32);
  Hologram ones(32, 32);
  for (auto& v : ones.values) v = 1.0;
  ones.scale = HologramScale::normalized;
  const auto f = optics::back_propagate(ones, cfg);
  for (size_t i = 0; i < f.size(); ++i)
    CHECK(std::hypot(f.re[i], f.im[i]) == doctest::Approx(1.0).epsilon(1e-9));

  // propagate(back_propagate(H), z).re == H for the real field reading
  optics::TargetSpec spec;
  spec.kind = optics::TargetKind::disc;
  spec.height = spec.width = 32;
  spec.disc_radius = 5.0;
  spec.phase_rad = 0.3;
  const auto t = optics::synthesize_target(spec);
  const auto h = optics::form_hologram(t, cfg);
  const auto back = optics::back_propagate(h, cfg);
  const auto again = optics::propagate(back, cfg, cfg.z_um);
  for (size_t i = 0; i < again.size(); ++i)
    CHECK(std::abs(again.re[i] - h.values[i]) < 1e-5);

  // energy is preserved through the unit-modulus transfer function
  ComplexField as_field(32, 32);
  as_field.re.assign(h.values.begin(), h.values.end());
  CHECK(back.norm2() == doctest::Approx(as_field.norm2()).epsilon(1e-6));
}

TEST_CASE("add_noise: determinism, zero sigma, sample statistics") {
  auto cfg = paper_optics(64, 64);
  optics::TargetSpec spec;
  spec.kind = optics::TargetKind::usaf_bars;
  spec.height = spec.width = 64;
  const auto t = optics::synthesize_target(spec);
  const auto h = optics::form_hologram(t, cfg);

  CHECK_THROWS_AS(optics::add_noise(h, -1.0, 0), ParamError);

  const auto same = optics::add_noise(h, 0.0, 5);
  CHECK(same.values == h.values);

  const auto n1 = optics::add_noise(h, 10.0, 7);
  const auto n2 = optics::add_noise(h, 10.0, 7);
  CHECK(n1.values == n2.values);
  const auto n3 = optics::add_noise(h, 10.0, 8);
  CHECK(n1.values != n3.values);
}

TEST_CASE("add_noise: empirical sigma on the 0-255 scale") {
  // Flat mid-range hologram (one max-anchor pixel) so nothing clamps.
  Hologram h(1000, 1000);
  for (auto& v : h.values) v = 0.5;
  h.values[0] = 1.0;
  h.scale = HologramScale::normalized;
  const double sigma = 10.0;
  const double up = 255.0;  // 255 / vmax with vmax = 1
  const auto noisy = optics::add_noise(h, sigma, 123);

  // add_noise renormalizes by the post-noise mean; that mean is within
  // O(sigma / (up * sqrt(n))) of the clean one, so undoing it with the
  // clean mean perturbs the variance estimate negligibly.
  double clean_mean = 0.0;
  for (double v : h.values) clean_mean += v;
  clean_mean /= double(h.values.size());

  double s1 = 0.0, s2 = 0.0;
  const size_t n = h.values.size() - 1;  // skip the clamp-prone anchor pixel
  for (size_t i = 1; i < h.values.size(); ++i) {
    const double eps = (noisy.values[i] * clean_mean - h.values[i]) * up;
    s1 += eps;
    s2 += eps * eps;
  }
  const double var = s2 / n - (s1 / n) * (s1 / n);
  CHECK(std::sqrt(var) == doctest::Approx(sigma).epsilon(0.01));
}

TEST_CASE("synthesize_target: degenerate disc, usaf fraction, exact phase") {
  optics::TargetSpec spec;
  spec.kind = optics::TargetKind::disc;
  spec.height = spec.width = 32;
  spec.disc_radius = 0.0;
  const auto empty = optics::synthesize_target(spec);
  for (size_t i = 0; i < empty.attenuation.size(); ++i) {
    CHECK(empty.attenuation[i] == 1.0);
    CHECK(empty.phase_shift[i] == 0.0);
    CHECK(empty.truth_mask[i] == 1);
  }

  optics::TargetSpec usaf;
  usaf.kind = optics::TargetKind::usaf_bars;
  usaf.height = usaf.width = 256;
  const auto t = optics::synthesize_target(usaf);
  size_t fg = 0;
  for (auto m : t.truth_mask) fg += (m == 0);
  const double frac = double(fg) / double(t.truth_mask.size());
  CHECK(frac > 0.05);
  CHECK(frac < 0.40);
  for (size_t i = 0; i < t.truth_mask.size(); ++i) {
    if (t.truth_mask[i])
      CHECK(t.phase_shift[i] == 0.0);
    else
      CHECK(t.phase_shift[i] == kPi / 2);
  }
}

TEST_CASE("synthesize_target: seeded random patterns are reproducible") {
  for (auto kind : {optics::TargetKind::cell_like, optics::TargetKind::dendrite_like}) {
    optics::TargetSpec spec;
    spec.kind = kind;
    spec.height = spec.width = 64;
    spec.seed = 9;
    const auto a = optics::synthesize_target(spec);
    const auto b = optics::synthesize_target(spec);
    CHECK(a.truth_mask == b.truth_mask);
    spec.seed = 10;
    const auto c = optics::synthesize_target(spec);
    CHECK(a.truth_mask != c.truth_mask);
    size_t fg = 0;
    for (auto m : a.truth_mask) fg += (m == 0);
    CHECK(fg > 0);
    CHECK(fg < a.truth_mask.size() / 2);
  }
}

TEST_CASE("synthesize_target: bitmap input") {
  const auto dir = temp_dir();
  io::GrayImage img;
  img.height = img.width = 16;
  img.bit_depth = 8;
  img.pixels.assign(256, 0);
  for (int y = 4; y < 12; ++y)
    for (int x = 4; x < 12; ++x) img.pixels[y * 16 + x] = 255;
  io::write_gray(dir / "pattern.png", img);

  optics::TargetSpec spec;
  spec.kind = optics::TargetKind::bitmap;
  spec.bitmap_path = dir / "pattern.png";
  const auto t = optics::synthesize_target(spec);
  CHECK(t.height == 16);
  CHECK(t.width == 16);
  CHECK(t.phase_shift[8 * 16 + 8] == doctest::Approx(kPi / 2));
  CHECK(t.phase_shift[0] == 0.0);

  spec.bitmap_path = dir / "missing.png";
  CHECK_THROWS_AS(optics::synthesize_target(spec), IoError);
}

TEST_CASE("HCF1 round trip is lossless for f32 data") {
  const auto dir = temp_dir();
  auto f = random_field(20, 12, 3);
  // quantize to f32 first so the round trip is exact
  for (auto& v : f.re) v = float(v);
  for (auto& v : f.im) v = float(v);
  save_hcf(f, dir / "x.hcf");
  const auto g = load_hcf(dir / "x.hcf");
  CHECK(g.height == 20);
  CHECK(g.width == 12);
  CHECK(max_abs_diff(f, g) == 0.0);

  CHECK_THROWS_AS(load_hcf(dir / "nope.hcf"), IoError);
}

TEST_CASE("hologram image round trip (PNG 16-bit and PGM)") {
  auto cfg = paper_optics(32, 32);
  optics::TargetSpec spec;
  spec.kind = optics::TargetKind::disc;
  spec.height = spec.width = 32;
  spec.disc_radius = 6.0;
  const auto t = optics::synthesize_target(spec);
  const auto h = optics::form_hologram(t, cfg);

  const auto dir = temp_dir();
  for (const char* name : {"h.png", "h.pgm"}) {
    save_hologram(h, dir / name, 16);
    const auto back = load_hologram(dir / name);
    CHECK(back.height == h.height);
    CHECK(back.scale == HologramScale::normalized);
    double max_err = 0.0;
    for (size_t i = 0; i < h.values.size(); ++i)
      max_err = std::max(max_err, std::abs(back.values[i] - h.values[i]));
    CHECK(max_err < 2e-4);  // 16-bit quantization
  }
}
