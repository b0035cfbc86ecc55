#pragma once

#include <optional>
#include <vector>

#include "holo/mask.hpp"
#include "holo/optics.hpp"

namespace holo::baselines {

/// Zeroth-order reference: a single back-propagation of the hologram
/// (or of sqrt(H) when sqrt_input).
ComplexField backprop_only(const Hologram& h, const OpticsConfig& optics,
                           bool sqrt_input = false);

struct GsResult {
  ComplexField object_field;             // constrained object-plane estimate
  ComplexField sensor_field;             // sensor estimate after the last replacement
  std::vector<double> residual_history;  // sensor-amplitude L2 residual, 1-based
};

/// Gerchberg-Saxton error reduction. Object-plane constraints: amplitude
/// clamped to <= 1 and, when a support is given, the field reset to 1+0j
/// outside it (support = 1 marks the object region).
GsResult gerchberg_saxton(const Hologram& h, const OpticsConfig& optics, int iters,
                          const std::optional<Mask>& support = std::nullopt);

}  // namespace holo::baselines
