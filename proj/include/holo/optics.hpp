#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "holo/field.hpp"

namespace holo {

/// Imaging geometry. All lengths in micrometers.
struct OpticsConfig {
  double wavelength_um = 0.532;
  double pixel_um = 2.0;
  double z_um = 5500.0;
  int height = 0;
  int width = 0;

  void validate() const;
};

/// Object transmittance t(x,y) = attenuation * exp(j * phase_shift),
/// with |t| <= 1; truth_mask marks background (1 = background).
struct ObjectTransmittance {
  int height = 0;
  int width = 0;
  std::vector<double> attenuation;  // in [0, 1]
  std::vector<double> phase_shift;  // radians
  std::vector<std::uint8_t> truth_mask;

  ComplexField to_field() const;
};

/// Angular-spectrum transfer function sampled on the discrete FFT
/// frequency grid. Unit magnitude on the propagating band, zero on the
/// evanescent band (evanescent_mask = 1 there).
struct TransferFunction {
  int height = 0;
  int width = 0;
  std::vector<std::complex<double>> values;
  std::vector<std::uint8_t> evanescent_mask;

  size_t evanescent_count() const {
    size_t n = 0;
    for (auto m : evanescent_mask) n += m;
    return n;
  }
};

namespace optics {

TransferFunction transfer_function(const OpticsConfig& cfg, double z_um);

/// Free-space angular-spectrum propagation over distance z_um
/// (ifft(P * fft(field))). propagate(.., z) then propagate(.., -z) is the
/// identity up to floating point when nothing is evanescent.
ComplexField propagate(const ComplexField& field, const OpticsConfig& cfg, double z_um);

/// Forms the in-line hologram of a transmittance under a unit plane
/// reference wave: H = |P_z(t)|^2, normalized to mean 1.
Hologram form_hologram(const ObjectTransmittance& t, const OpticsConfig& cfg);

/// Back-propagates a captured hologram to the object plane; this is the
/// 2-channel network input. With sqrt_input, sqrt(H) is propagated instead.
ComplexField back_propagate(const Hologram& h, const OpticsConfig& cfg,
                            bool sqrt_input = false);

/// Additive white Gaussian noise expressed on the 0-255 intensity scale,
/// with clamping there and renormalization afterwards. Deterministic in seed.
Hologram add_noise(const Hologram& h, double sigma, std::uint64_t seed);

enum class TargetKind { usaf_bars, disc, text, bitmap, cell_like, dendrite_like };

/// Synthetic target description for simulated experiments.
struct TargetSpec {
  TargetKind kind = TargetKind::usaf_bars;
  int height = 256;
  int width = 256;
  double phase_rad = 1.5707963267948966;  // phase shift on the pattern
  double attenuation = 1.0;               // amplitude on the pattern (1 = pure phase)
  double disc_radius = 0.0;               // pixels, disc only
  std::uint64_t seed = 0;                 // cell_like / dendrite_like
  std::filesystem::path bitmap_path;      // bitmap only
};

TargetKind target_kind_from_name(const std::string& name);

/// Builds the transmittance of a named pattern; truth_mask is the
/// complement of the pattern support.
ObjectTransmittance synthesize_target(const TargetSpec& spec);

/// Fraction of frequency-grid entries in the evanescent band.
double evanescent_fraction(const OpticsConfig& cfg);

}  // namespace optics

/// Hologram <-> grayscale image files (8/16-bit PNG or PGM). Writing maps
/// [0, max(values)] onto the full sample range; reading renormalizes to
/// mean 1.
void save_hologram(const Hologram& h, const std::filesystem::path& path,
                   int bit_depth = 16);
Hologram load_hologram(const std::filesystem::path& path);

}  // namespace holo
