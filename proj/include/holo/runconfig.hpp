#pragma once

#include <filesystem>
#include <string>

#include "holo/optics.hpp"
#include "holo/trainer.hpp"

namespace holo::cli {

/// Effective configuration of a run, assembled from defaults, an optional
/// JSON config file and command-line overrides (in that precedence order,
/// with the HOLO_SEED environment variable overriding every seed last).
struct RunConfig {
  OpticsConfig optics;  // grid size filled in from the actual input
  trainer::TrainConfig train;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  std::filesystem::path input;
  std::filesystem::path out_dir;

  /// Parses and validates a JSON config file. Unknown keys anywhere are
  /// rejected; the error lists every offending key.
  void merge_file(const std::filesystem::path& path);

  /// Applies the HOLO_SEED override when the variable is set.
  void apply_env();

  /// Complete effective configuration as JSON text.
  std::string echo_json() const;
};

}  // namespace holo::cli
