#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "holo/optics.hpp"
#include "holo/trainer.hpp"

namespace holo::evalx {

/// Peak signal-to-noise ratio in dB for images in [0, 1]; identical images
/// hit the documented 99 dB cap.
double psnr(std::span<const double> a, std::span<const double> b, int height, int width);

/// Mean local SSIM, Gaussian window 11x11 (sigma 1.5), K1=0.01, K2=0.03,
/// dynamic range 1. Images must be at least 11x11.
double ssim(std::span<const double> a, std::span<const double> b, int height, int width);

/// Reconstruction amplitude (clipped to [0,1], pooled back to the capture
/// grid when super-resolved) against the target attenuation.
double amplitude_psnr(const trainer::ReconstructionResult& r,
                      const ObjectTransmittance& truth);
double amplitude_ssim(const trainer::ReconstructionResult& r,
                      const ObjectTransmittance& truth);

struct RunRecord {
  std::string method;
  double sigma = 0.0;
  int iterations = 0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
};

struct MetricReport {
  std::string scenario;
  std::vector<RunRecord> runs;
  std::string config_echo;  // JSON text fully describing the run

  std::string to_json() const;
  std::string to_table() const;
};

/// Reconstructs the target under each noise level and scores amplitude
/// PSNR/SSIM against the ground truth.
MetricReport run_noise_sweep(const ObjectTransmittance& target,
                             const OpticsConfig& optics,
                             const trainer::TrainConfig& cfg,
                             const std::vector<double>& sigmas,
                             std::uint64_t noise_seed);

struct TransferSample {
  std::string label;
  Hologram hologram;
  std::vector<double> truth_amplitude;  // capture grid, in [0,1]
};

/// Three-scenario transfer study on S1..S4: the one-shot model trained on
/// S1 applied frozen to S2-S4, per-sample retraining from random weights,
/// and warm-started retraining from the S1 checkpoint.
MetricReport run_transfer_experiment(const std::vector<TransferSample>& samples,
                                     const OpticsConfig& optics,
                                     const trainer::TrainConfig& cfg,
                                     int extra_iterations,
                                     const std::filesystem::path& work_dir);

struct PcaPoint {
  std::string label;
  double pc1 = 0.0;
  double pc2 = 0.0;
};

struct PcaResult {
  std::vector<PcaPoint> points;
  std::array<double, 2> eigenvalues{0.0, 0.0};
  // top-2 principal directions in weight space (filled on request)
  std::vector<std::vector<double>> components;
};

/// Projects flattened weight snapshots onto their top-2 principal
/// directions (Gram-matrix eigendecomposition of the centered data).
/// Every vector must have the same length.
PcaResult pca_weight_trajectories(
    const std::vector<std::pair<std::string, std::vector<std::vector<double>>>>& runs,
    bool want_components = false);

/// Loads one run's trajectory from its checkpoint directories.
std::vector<std::vector<double>> load_trajectory(
    const std::vector<std::filesystem::path>& checkpoint_dirs, bool sr_enabled);

void write_pca_csv(const PcaResult& pca, const std::filesystem::path& path);
void write_pca_svg(const PcaResult& pca, const std::filesystem::path& path);

}  // namespace holo::evalx
