#pragma once

#include <cstdint>
#include <span>

#include "holo/field.hpp"
#include "holo/mask.hpp"

namespace holo::masking {

/// State of the adaptive background-masking loop. Before the first update
/// (step = 0) the mask is all ones: the whole image counts as background.
struct MaskState {
  Mask mask;
  double temperature = 1.0;
  int step = 0;
  double last_delta = 0.0;

  static MaskState initial(int height, int width, double t0) {
    MaskState s;
    s.mask = Mask(height, width, 1);
    s.temperature = t0;
    s.step = 0;
    s.last_delta = 0.0;
    return s;
  }
};

/// Two-cluster Lloyd segmentation on the amplitude values. Deterministic:
/// centroids start at the 10th/90th percentiles; the background cluster is
/// the one holding the majority of image-border pixels. Degenerate
/// (constant) input yields an all-background mask.
Mask kmeans2_segment(std::span<const double> amplitude, int height, int width);

/// Mean of (H - Hhat)^2 over mask==1 pixels. A mask on a 2x finer grid is
/// reduced to the hologram grid first; an empty mask gives 0.
double masked_mse(const Hologram& h, const Hologram& hhat, const Mask& mask);

struct SaResult {
  MaskState state;
  bool accepted = false;
  double delta_old = 0.0;
  double delta_new = 0.0;
};

/// One accept/reject transition of the annealed mask update: improving
/// proposals are always taken, worsening ones with probability
/// exp(-(delta_new - delta_old) / T); afterwards T <- T / ln(1+t) for
/// steps t >= 2 and the step counter advances.
SaResult sa_update(const MaskState& state, const Mask& proposal, const Hologram& h,
                   const Hologram& hhat, std::uint64_t rng_seed);

}  // namespace holo::masking
