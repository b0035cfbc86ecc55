#include "holo/runconfig.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <vector>

namespace holo::cli {

namespace {

using nlohmann::json;

void collect_unknown(const json& obj, const std::set<std::string>& allowed,
                     const std::string& prefix, std::vector<std::string>& bad) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) bad.push_back(prefix + key);
}

template <typename T>
void take(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void take_path(const json& obj, const char* key, std::filesystem::path& out) {
  if (obj.contains(key)) out = obj.at(key).get<std::string>();
}

}  // namespace

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  std::vector<std::string> bad;
  collect_unknown(j, {"optics", "train", "loss", "mask", "noise", "io"}, "", bad);

  if (j.contains("optics")) {
    const auto& o = j["optics"];
    collect_unknown(o, {"wavelength_um", "pixel_um", "z_um", "backprop_sqrt"},
                    "optics.", bad);
  }
  if (j.contains("train")) {
    collect_unknown(j["train"],
                    {"iterations", "d_steps_per_interval", "lr_g", "lr_d", "adam_beta1",
                     "adam_beta2", "seed", "sr_enabled", "checkpoint_interval"},
                    "train.", bad);
  }
  if (j.contains("loss"))
    collect_unknown(j["loss"], {"lambda1", "lambda2"}, "loss.", bad);
  if (j.contains("mask"))
    collect_unknown(j["mask"], {"k_interval", "t0_factor", "enabled"}, "mask.", bad);
  if (j.contains("noise")) collect_unknown(j["noise"], {"sigma", "seed"}, "noise.", bad);
  if (j.contains("io"))
    collect_unknown(j["io"], {"input", "out_dir", "init_checkpoint", "init_checkpoint_d"},
                    "io.", bad);

  if (!bad.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : bad) msg += " " + k;
    throw ConfigError(msg);
  }

  try {
    if (j.contains("optics")) {
      const auto& o = j["optics"];
      take(o, "wavelength_um", optics.wavelength_um);
      take(o, "pixel_um", optics.pixel_um);
      take(o, "z_um", optics.z_um);
      take(o, "backprop_sqrt", train.backprop_sqrt);
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      take(t, "iterations", train.iterations);
      take(t, "d_steps_per_interval", train.d_steps_per_interval);
      take(t, "lr_g", train.lr_g);
      take(t, "lr_d", train.lr_d);
      take(t, "adam_beta1", train.adam_beta1);
      take(t, "adam_beta2", train.adam_beta2);
      take(t, "seed", train.seed);
      take(t, "sr_enabled", train.sr_enabled);
      take(t, "checkpoint_interval", train.checkpoint_interval);
    }
    if (j.contains("loss")) {
      take(j["loss"], "lambda1", train.loss_weights.lambda1);
      take(j["loss"], "lambda2", train.loss_weights.lambda2);
    }
    if (j.contains("mask")) {
      take(j["mask"], "k_interval", train.mask_interval_k);
      take(j["mask"], "t0_factor", train.t0_factor);
      take(j["mask"], "enabled", train.masking_enabled);
    }
    if (j.contains("noise")) {
      take(j["noise"], "sigma", noise_sigma);
      take(j["noise"], "seed", noise_seed);
    }
    if (j.contains("io")) {
      take_path(j["io"], "input", input);
      take_path(j["io"], "out_dir", out_dir);
      take_path(j["io"], "init_checkpoint", train.init_checkpoint);
      take_path(j["io"], "init_checkpoint_d", train.init_checkpoint_d);
    }
  } catch (const json::exception& e) {
    throw ConfigError("config value has the wrong type: " + std::string(e.what()));
  }
}

void RunConfig::apply_env() {
  if (const char* env = std::getenv("HOLO_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || (end && *end != '\0'))
      throw ConfigError("HOLO_SEED must be an unsigned integer");
    train.seed = v;
    noise_seed = v;
  }
}

std::string RunConfig::echo_json() const {
  json j;
  j["optics"] = {{"wavelength_um", optics.wavelength_um},
                 {"pixel_um", optics.pixel_um},
                 {"z_um", optics.z_um},
                 {"backprop_sqrt", train.backprop_sqrt}};
  j["train"] = {{"iterations", train.iterations},
                {"d_steps_per_interval", train.d_steps_per_interval},
                {"lr_g", train.lr_g},
                {"lr_d", train.lr_d},
                {"adam_beta1", train.adam_beta1},
                {"adam_beta2", train.adam_beta2},
                {"seed", train.seed},
                {"sr_enabled", train.sr_enabled},
                {"checkpoint_interval", train.checkpoint_interval},
                {"gan_enabled", train.gan_enabled}};
  j["loss"] = {{"lambda1", train.loss_weights.lambda1},
               {"lambda2", train.loss_weights.lambda2}};
  j["mask"] = {{"k_interval", train.mask_interval_k},
               {"t0_factor", train.t0_factor},
               {"enabled", train.masking_enabled}};
  j["noise"] = {{"sigma", noise_sigma}, {"seed", noise_seed}};
  j["io"] = {{"input", input.string()},
             {"out_dir", out_dir.string()},
             {"init_checkpoint", train.init_checkpoint.string()},
             {"init_checkpoint_d", train.init_checkpoint_d.string()}};
  return j.dump(2);
}

}  // namespace holo::cli
