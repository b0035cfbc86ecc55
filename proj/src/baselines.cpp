#include "holo/baselines.hpp"

#include <cmath>

#include "holo/errors.hpp"

namespace holo::baselines {

ComplexField backprop_only(const Hologram& h, const OpticsConfig& optics,
                           bool sqrt_input) {
  return optics::back_propagate(h, optics, sqrt_input);
}

GsResult gerchberg_saxton(const Hologram& h, const OpticsConfig& optics, int iters,
                          const std::optional<Mask>& support) {
  if (iters < 1) throw ParamError("gerchberg_saxton: iters must be >= 1");
  if (support && (support->height != h.height || support->width != h.width))
    throw DimensionError("gerchberg_saxton: support shape mismatch");
  OpticsConfig cfg = optics;
  cfg.height = h.height;
  cfg.width = h.width;
  cfg.validate();

  std::vector<double> target(h.values.size());
  for (size_t i = 0; i < target.size(); ++i)
    target[i] = std::sqrt(std::max(0.0, h.values[i]));

  // Sensor estimate starts as sqrt(H) with zero phase.
  ComplexField sensor(h.height, h.width);
  sensor.re = target;

  GsResult result;
  result.residual_history.reserve(iters);
  ComplexField object;
  for (int it = 1; it <= iters; ++it) {
    object = optics::propagate(sensor, cfg, -cfg.z_um);
    // Object-plane constraints.
    for (size_t i = 0; i < object.size(); ++i) {
      if (support && !support->values[i]) {
        object.re[i] = 1.0;
        object.im[i] = 0.0;
        continue;
      }
      const double mag = std::hypot(object.re[i], object.im[i]);
      if (mag > 1.0) {
        object.re[i] /= mag;
        object.im[i] /= mag;
      }
    }
    sensor = optics::propagate(object, cfg, cfg.z_um);
    double res2 = 0.0;
    for (size_t i = 0; i < sensor.size(); ++i) {
      const double mag = std::hypot(sensor.re[i], sensor.im[i]);
      const double d = mag - target[i];
      res2 += d * d;
    }
    result.residual_history.push_back(std::sqrt(res2));
    // Sensor-amplitude replacement, keeping the phase.
    for (size_t i = 0; i < sensor.size(); ++i) {
      const double mag = std::hypot(sensor.re[i], sensor.im[i]);
      if (mag > 0.0) {
        sensor.re[i] *= target[i] / mag;
        sensor.im[i] *= target[i] / mag;
      } else {
        sensor.re[i] = target[i];
        sensor.im[i] = 0.0;
      }
    }
  }
  result.object_field = std::move(object);
  result.sensor_field = std::move(sensor);
  return result;
}

}  // namespace holo::baselines
