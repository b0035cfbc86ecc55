#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "holo/baselines.hpp"
#include "holo/evalx.hpp"

using namespace holo;
using namespace holo::baselines;

namespace {

OpticsConfig paper_optics(int h, int w) {
  OpticsConfig cfg;
  cfg.wavelength_um = 0.532;
  cfg.pixel_um = 2.0;
  cfg.z_um = 1500.0;
  cfg.height = h;
  cfg.width = w;
  return cfg;
}

ObjectTransmittance disc_target(int n, double radius, double a0 = 0.6) {
  optics::TargetSpec spec;
  spec.kind = optics::TargetKind::disc;
  spec.height = spec.width = n;
  spec.disc_radius = radius;
  spec.attenuation = a0;
  spec.phase_rad = 0.8;
  return optics::synthesize_target(spec);
}

std::vector<double> clipped_amplitude(const ComplexField& f) {
  auto a = f.amplitude();
  for (auto& v : a) v = std::clamp(v, 0.0, 1.0);
  return a;
}

}  // namespace

TEST_CASE("backprop_only: unit hologram gives a constant field, deterministic") {
  auto cfg = paper_optics(32, 32);
  Hologram ones(32, 32);
  for (auto& v : ones.values) v = 1.0;
  ones.scale = HologramScale::normalized;

  const auto f = backprop_only(ones, cfg);
  for (size_t i = 0; i < f.size(); ++i)
    CHECK(std::hypot(f.re[i], f.im[i]) == doctest::Approx(1.0).epsilon(1e-9));

  const auto g = backprop_only(ones, cfg);
  CHECK(f.re == g.re);
  CHECK(f.im == g.im);
}

TEST_CASE("backprop_only: disc target shows an amplitude dip at the disc") {
  const int n = 64;
  auto cfg = paper_optics(n, n);
  const auto t = disc_target(n, 10.0);
  const auto h = optics::form_hologram(t, cfg);
  const auto f = backprop_only(h, cfg);
  const auto amp = f.amplitude();

  double inside = 0.0, outside = 0.0;
  size_t n_in = 0, n_out = 0;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      const double r = std::hypot(y - (n - 1) / 2.0, x - (n - 1) / 2.0);
      if (r < 7.0) {
        inside += amp[size_t(y) * n + x];
        ++n_in;
      } else if (r > 20.0) {
        outside += amp[size_t(y) * n + x];
        ++n_out;
      }
    }
  CHECK(inside / n_in < outside / n_out);
}

TEST_CASE("gerchberg_saxton: unit hologram is a fixed point") {
  auto cfg = paper_optics(32, 32);
  Hologram ones(32, 32);
  for (auto& v : ones.values) v = 1.0;
  ones.scale = HologramScale::normalized;
  const auto gs = gerchberg_saxton(ones, cfg, 5);
  for (size_t i = 0; i < gs.object_field.size(); ++i) {
    CHECK(gs.object_field.re[i] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(gs.object_field.im[i]) < 1e-9);
  }
  for (double r : gs.residual_history) CHECK(r < 1e-9);
}

TEST_CASE("gerchberg_saxton: residual decreases and the sensor constraint is exact") {
  const int n = 64;
  auto cfg = paper_optics(n, n);
  const auto t = disc_target(n, 10.0);
  const auto h = optics::form_hologram(t, cfg);

  const auto gs = gerchberg_saxton(h, cfg, 100);
  REQUIRE(gs.residual_history.size() == 100);
  CHECK(gs.residual_history[99] < gs.residual_history[0]);

  // After the replacement step the sensor amplitude equals sqrt(H) exactly.
  for (size_t i = 0; i < gs.sensor_field.size(); ++i) {
    const double mag = std::hypot(gs.sensor_field.re[i], gs.sensor_field.im[i]);
    const double want = std::sqrt(std::max(0.0, h.values[i]));
    CHECK(mag == doctest::Approx(want).epsilon(1e-12));
  }

  CHECK_THROWS_AS(gerchberg_saxton(h, cfg, 0), ParamError);
}

TEST_CASE("gerchberg_saxton: a true support mask improves the reconstruction") {
  const int n = 64;
  auto cfg = paper_optics(n, n);
  const auto t = disc_target(n, 10.0);
  const auto h = optics::form_hologram(t, cfg);

  Mask support(n, n, 0);
  for (size_t i = 0; i < support.values.size(); ++i)
    support.values[i] = t.truth_mask[i] ? 0 : 1;  // 1 = object region

  const auto plain = gerchberg_saxton(h, cfg, 60);
  const auto with_support = gerchberg_saxton(h, cfg, 60, support);

  const double p0 = evalx::psnr(clipped_amplitude(plain.object_field), t.attenuation, n, n);
  const double p1 =
      evalx::psnr(clipped_amplitude(with_support.object_field), t.attenuation, n, n);
  CHECK(p1 > p0);
}
