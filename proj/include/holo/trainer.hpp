#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "holo/adam.hpp"
#include "holo/masking.hpp"
#include "holo/nets.hpp"
#include "holo/objective.hpp"
#include "holo/optics.hpp"

namespace holo::trainer {

struct TrainConfig {
  int iterations = 3000;        // intervals
  int d_steps_per_interval = 5;
  int mask_interval_k = 100;
  double lr_g = 1e-3;
  double lr_d = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  objective::LossWeights loss_weights{};
  std::uint64_t seed = 0;
  bool sr_enabled = true;
  double t0_factor = 0.1;
  std::filesystem::path init_checkpoint;    // generator warm start (empty = random)
  std::filesystem::path init_checkpoint_d;  // optional discriminator warm start
  bool masking_enabled = true;
  bool gan_enabled = true;   // false reduces to the plain autoencoder objective
  bool backprop_sqrt = false;
  int checkpoint_interval = 100;  // 0 disables periodic checkpoints
  std::filesystem::path out_dir;  // empty = no files emitted

  void validate() const;
};

struct IntervalRecord {
  int interval = 0;
  double loss_g = 0.0;
  double loss_d = 0.0;
  double loss_auto = 0.0;
  double loss_b = 0.0;
  std::optional<bool> mask_accepted;  // set only on mask-update intervals
  double temperature = 0.0;
};

struct ReconstructionResult {
  ComplexField object_wave;  // reconstruction grid (2x the capture when SR)
  std::vector<double> amplitude;
  std::vector<double> phase;
  int height = 0;
  int width = 0;
  Mask final_mask;
  std::vector<IntervalRecord> history;
  std::vector<std::filesystem::path> checkpoints;
};

/// One reconstruction in progress. Owns the networks, optimizer state and
/// the mask state; run_interval() executes one schedule interval (one
/// generator step, the optional mask update, then the discriminator steps).
class Session {
 public:
  Session(const Hologram& hologram, const OpticsConfig& optics, const TrainConfig& cfg);
  ~Session();
  Session(Session&&) noexcept;

  void run_interval();
  ReconstructionResult finish();

  int interval() const;
  const std::vector<IntervalRecord>& history() const;
  int generator_updates() const;
  int discriminator_updates() const;
  int mask_attempts() const;
  const masking::MaskState& mask_state() const;
  nets::Network<float>& generator();
  nets::Network<float>& discriminator();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Full hologram -> object-wave pipeline over cfg.iterations intervals.
ReconstructionResult reconstruct(const Hologram& hologram, const OpticsConfig& optics,
                                 const TrainConfig& cfg);

/// Map of the 16-bit phase export: (-pi, pi] onto [0, 65535] linearly.
std::vector<double> phase_to_unit(const std::vector<double>& phase);

void write_result_files(const ReconstructionResult& result,
                        const std::filesystem::path& out_dir);

}  // namespace holo::trainer
