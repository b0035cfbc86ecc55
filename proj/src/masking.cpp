#include "holo/masking.hpp"

#include <algorithm>
#include <cmath>

#include "holo/errors.hpp"
#include "holo/rng.hpp"

namespace holo::masking {

namespace {

double percentile(std::vector<double> sorted, double p) {
  // linear interpolation between closest ranks; input already sorted
  const double pos = p * double(sorted.size() - 1);
  const size_t lo = size_t(pos);
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - double(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

Mask kmeans2_segment(std::span<const double> amplitude, int height, int width) {
  if (amplitude.size() != size_t(height) * width)
    throw DimensionError("kmeans2_segment: size mismatch");

  const auto [mn, mx] = std::minmax_element(amplitude.begin(), amplitude.end());
  if (*mx - *mn < 1e-12) return Mask(height, width, 1);  // degenerate: all background

  std::vector<double> sorted(amplitude.begin(), amplitude.end());
  std::sort(sorted.begin(), sorted.end());
  double c0 = percentile(sorted, 0.10);
  double c1 = percentile(sorted, 0.90);
  if (c1 - c0 < 1e-12) return Mask(height, width, 1);

  std::vector<std::uint8_t> label(amplitude.size(), 0);
  for (int it = 0; it < 50; ++it) {
    double sum0 = 0.0, sum1 = 0.0;
    size_t n0 = 0, n1 = 0;
    for (size_t i = 0; i < amplitude.size(); ++i) {
      const double v = amplitude[i];
      const bool to1 = std::abs(v - c1) < std::abs(v - c0);
      label[i] = to1 ? 1 : 0;
      if (to1) {
        sum1 += v;
        ++n1;
      } else {
        sum0 += v;
        ++n0;
      }
    }
    const double nc0 = n0 ? sum0 / double(n0) : c0;
    const double nc1 = n1 ? sum1 / double(n1) : c1;
    const double move = std::max(std::abs(nc0 - c0), std::abs(nc1 - c1));
    c0 = nc0;
    c1 = nc1;
    if (move < 1e-6) break;
  }

  // Background = the cluster owning most of the image border.
  size_t border1 = 0, border_total = 0;
  auto tally = [&](int y, int x) {
    border1 += label[size_t(y) * width + x];
    ++border_total;
  };
  for (int x = 0; x < width; ++x) {
    tally(0, x);
    if (height > 1) tally(height - 1, x);
  }
  for (int y = 1; y + 1 < height; ++y) {
    tally(y, 0);
    if (width > 1) tally(y, width - 1);
  }
  const std::uint8_t bg_label = (2 * border1 >= border_total) ? 1 : 0;

  Mask m(height, width, 0);
  for (size_t i = 0; i < amplitude.size(); ++i) m.values[i] = label[i] == bg_label ? 1 : 0;
  return m;
}

double masked_mse(const Hologram& h, const Hologram& hhat, const Mask& mask) {
  if (h.height != hhat.height || h.width != hhat.width)
    throw DimensionError("masked_mse: hologram shape mismatch");
  const Mask* m = &mask;
  Mask reduced;
  if (mask.height == 2 * h.height && mask.width == 2 * h.width) {
    reduced = downsample2x(mask);
    m = &reduced;
  } else if (mask.height != h.height || mask.width != h.width) {
    throw DimensionError("masked_mse: mask shape mismatch");
  }

  double s = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < h.values.size(); ++i) {
    if (!m->values[i]) continue;
    const double d = h.values[i] - hhat.values[i];
    s += d * d;
    ++n;
  }
  return n ? s / double(n) : 0.0;
}

SaResult sa_update(const MaskState& state, const Mask& proposal, const Hologram& h,
                   const Hologram& hhat, std::uint64_t rng_seed) {
  if (!(state.temperature > 0.0)) throw ParamError("sa_update: temperature must be > 0");

  SaResult r;
  r.delta_old = masked_mse(h, hhat, state.mask);
  r.delta_new = masked_mse(h, hhat, proposal);

  if (r.delta_new < r.delta_old) {
    r.accepted = true;
  } else {
    const double p = std::exp(-(r.delta_new - r.delta_old) / state.temperature);
    Rng rng(Rng::derive(rng_seed, 0x7361ULL));
    r.accepted = rng.uniform() <= p;
  }

  r.state.mask = r.accepted ? proposal : state.mask;
  r.state.step = state.step + 1;
  r.state.last_delta = r.accepted ? r.delta_new : r.delta_old;
  // Cooling: T / ln(1+t) would warm up at t = 1 (ln 2 < 1), so the decay
  // starts at t = 2 where it is a genuine decrease.
  const int t = r.state.step;
  r.state.temperature =
      t >= 2 ? state.temperature / std::log1p(double(t)) : state.temperature;
  return r;
}

}  // namespace holo::masking
