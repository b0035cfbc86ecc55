// Command-line front end: simulate, reconstruct, baseline, eval,
// sweep-noise, transfer and pca subcommands over the holo library.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "holo/baselines.hpp"
#include "holo/evalx.hpp"
#include "holo/image_io.hpp"
#include "holo/runconfig.hpp"

namespace fs = std::filesystem;
using namespace holo;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct TargetArgs {
  std::string pattern = "usaf";
  std::string bitmap;
  int height = 256;
  int width = 256;
  double phi0 = kPi / 2.0;
  double a0 = 1.0;
  double radius = 32.0;
  std::uint64_t pattern_seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--target", pattern,
                    "pattern: usaf|disc|text|cell|dendrite|bitmap");
    cmd->add_option("--bitmap", bitmap, "binary image file for --target bitmap");
    cmd->add_option("--height", height, "target height in pixels");
    cmd->add_option("--width", width, "target width in pixels");
    cmd->add_option("--phi0", phi0, "phase shift on the pattern (radians)");
    cmd->add_option("--a0", a0, "attenuation on the pattern (1 = pure phase)");
    cmd->add_option("--radius", radius, "disc radius in pixels");
    cmd->add_option("--pattern-seed", pattern_seed, "seed for random patterns");
  }

  optics::TargetSpec spec() const {
    optics::TargetSpec s;
    s.kind = optics::target_kind_from_name(pattern);
    s.height = height;
    s.width = width;
    s.phase_rad = phi0;
    s.attenuation = a0;
    s.disc_radius = radius;
    s.seed = pattern_seed;
    s.bitmap_path = bitmap;
    return s;
  }
};

std::vector<double> unit_image(const io::GrayImage& img) {
  std::vector<double> v(img.pixels.size());
  const double maxv = img.max_value();
  for (size_t i = 0; i < v.size(); ++i) v[i] = img.pixels[i] / maxv;
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (text.empty() || text.back() != '\n') os << "\n";
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_simulate(const cli::RunConfig& cfg, const TargetArgs& target,
                 const fs::path& out, const fs::path& truth_path,
                 const fs::path& truth_mask_path, int bit_depth) {
  const ObjectTransmittance t = optics::synthesize_target(target.spec());
  OpticsConfig opt = cfg.optics;
  opt.height = t.height;
  opt.width = t.width;
  Hologram h = optics::form_hologram(t, opt);
  if (cfg.noise_sigma > 0.0) h = optics::add_noise(h, cfg.noise_sigma, cfg.noise_seed);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_hologram(h, out, bit_depth);
  if (!truth_path.empty()) save_hcf(t.to_field(), truth_path);
  if (!truth_mask_path.empty()) {
    Mask m(t.height, t.width, 0);
    m.values.assign(t.truth_mask.begin(), t.truth_mask.end());
    save_mask(m, truth_mask_path);
  }
  write_text(out.string() + ".config.json", cfg.echo_json());
  std::cout << "wrote " << out.string() << " (" << t.height << "x" << t.width
            << ", mean-normalized)\n";
  return 0;
}

int cmd_reconstruct(cli::RunConfig cfg) {
  if (cfg.input.empty()) throw ConfigError("reconstruct: --input is required");
  if (cfg.out_dir.empty()) throw ConfigError("reconstruct: --out-dir is required");
  const Hologram h = load_hologram(cfg.input);
  cfg.optics.height = h.height;
  cfg.optics.width = h.width;
  cfg.train.out_dir = cfg.out_dir;
  fs::create_directories(cfg.out_dir);
  write_text(cfg.out_dir / "config_echo.json", cfg.echo_json());
  const auto result = trainer::reconstruct(h, cfg.optics, cfg.train);
  std::cout << "reconstructed " << cfg.input.string() << " -> "
            << cfg.out_dir.string() << " (" << result.history.size()
            << " intervals)\n";
  return 0;
}

int cmd_baseline(cli::RunConfig cfg, const std::string& method, int iters,
                 const fs::path& support_path) {
  if (cfg.input.empty()) throw ConfigError("baseline: --input is required");
  if (cfg.out_dir.empty()) throw ConfigError("baseline: --out-dir is required");
  const Hologram h = load_hologram(cfg.input);
  cfg.optics.height = h.height;
  cfg.optics.width = h.width;
  fs::create_directories(cfg.out_dir);

  ComplexField field;
  if (method == "backprop") {
    field = baselines::backprop_only(h, cfg.optics, cfg.train.backprop_sqrt);
  } else if (method == "gs") {
    std::optional<Mask> support;
    if (!support_path.empty()) support = load_mask(support_path);
    auto gs = baselines::gerchberg_saxton(h, cfg.optics, iters, support);
    field = std::move(gs.object_field);
    std::ostringstream res;
    res << "iteration,residual\n";
    for (size_t i = 0; i < gs.residual_history.size(); ++i)
      res << (i + 1) << "," << gs.residual_history[i] << "\n";
    write_text(cfg.out_dir / "residuals.csv", res.str());
  } else {
    throw ConfigError("baseline: unknown --method (use gs or backprop)");
  }

  trainer::ReconstructionResult r;
  r.height = field.height;
  r.width = field.width;
  r.amplitude = field.amplitude();
  r.phase = field.phase();
  r.object_wave = std::move(field);
  r.final_mask = Mask(r.height, r.width, 1);
  trainer::write_result_files(r, cfg.out_dir);
  write_text(cfg.out_dir / "config_echo.json", cfg.echo_json());
  std::cout << "baseline " << method << " -> " << cfg.out_dir.string() << "\n";
  return 0;
}

int cmd_eval(const fs::path& a_path, const fs::path& b_path, const std::string& metric,
             const fs::path& json_out) {
  const io::GrayImage ia = io::read_gray(a_path);
  const io::GrayImage ib = io::read_gray(b_path);
  if (ia.height != ib.height || ia.width != ib.width)
    throw DimensionError("eval: images have different sizes");
  const auto a = unit_image(ia);
  const auto b = unit_image(ib);
  nlohmann::json j;
  if (metric == "psnr" || metric == "both") {
    const double v = evalx::psnr(a, b, ia.height, ia.width);
    std::cout << "psnr_db " << v << "\n";
    j["psnr_db"] = v;
  }
  if (metric == "ssim" || metric == "both") {
    const double v = evalx::ssim(a, b, ia.height, ia.width);
    std::cout << "ssim " << v << "\n";
    j["ssim"] = v;
  }
  if (!json_out.empty()) write_text(json_out, j.dump(2));
  return 0;
}

int cmd_sweep_noise(const cli::RunConfig& cfg, const TargetArgs& target,
                    const std::string& sigmas_csv) {
  if (cfg.out_dir.empty()) throw ConfigError("sweep-noise: --out-dir is required");
  std::vector<double> sigmas;
  for (const auto& s : split_list(sigmas_csv)) sigmas.push_back(std::stod(s));
  if (sigmas.empty()) throw ConfigError("sweep-noise: --sigmas list is empty");

  const ObjectTransmittance t = optics::synthesize_target(target.spec());
  OpticsConfig opt = cfg.optics;
  opt.height = t.height;
  opt.width = t.width;
  const auto report = evalx::run_noise_sweep(t, opt, cfg.train, sigmas, cfg.noise_seed);
  fs::create_directories(cfg.out_dir);
  write_text(cfg.out_dir / "report.json", report.to_json());
  write_text(cfg.out_dir / "report.txt", report.to_table());
  write_text(cfg.out_dir / "config_echo.json", cfg.echo_json());
  std::cout << report.to_table();
  return 0;
}

int cmd_transfer(const cli::RunConfig& cfg, const TargetArgs& target,
                 const std::string& seeds_csv, int extra_iterations) {
  if (cfg.out_dir.empty()) throw ConfigError("transfer: --out-dir is required");
  const auto seed_items = split_list(seeds_csv);
  if (seed_items.size() != 4)
    throw ConfigError("transfer: --seeds needs exactly 4 pattern seeds (S1..S4)");

  OpticsConfig opt = cfg.optics;
  opt.height = target.height;
  opt.width = target.width;
  std::vector<evalx::TransferSample> samples;
  for (size_t i = 0; i < seed_items.size(); ++i) {
    TargetArgs ta = target;
    ta.pattern_seed = std::stoull(seed_items[i]);
    const ObjectTransmittance t = optics::synthesize_target(ta.spec());
    evalx::TransferSample s;
    s.label = "S" + std::to_string(i + 1);
    s.hologram = optics::form_hologram(t, opt);
    if (cfg.noise_sigma > 0.0)
      s.hologram = optics::add_noise(s.hologram, cfg.noise_sigma, cfg.noise_seed);
    s.truth_amplitude = t.attenuation;
    samples.push_back(std::move(s));
  }
  const auto report = evalx::run_transfer_experiment(samples, opt, cfg.train,
                                                     extra_iterations,
                                                     cfg.out_dir / "work");
  write_text(cfg.out_dir / "report.json", report.to_json());
  write_text(cfg.out_dir / "report.txt", report.to_table());
  write_text(cfg.out_dir / "config_echo.json", cfg.echo_json());
  std::cout << report.to_table();
  return 0;
}

int cmd_pca(const std::vector<std::string>& run_dirs, const std::string& labels_csv,
            const fs::path& out_csv, const fs::path& out_svg) {
  if (run_dirs.empty()) throw ConfigError("pca: at least one --runs directory needed");
  auto labels = split_list(labels_csv);

  std::vector<std::pair<std::string, std::vector<std::vector<double>>>> runs;
  for (size_t i = 0; i < run_dirs.size(); ++i) {
    const fs::path dir = fs::path(run_dirs[i]) / "checkpoints";
    std::vector<fs::path> ckpts;
    if (fs::exists(dir))
      for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory() && e.path().filename().string().rfind("ckpt_", 0) == 0)
          ckpts.push_back(e.path());
    std::sort(ckpts.begin(), ckpts.end());
    if (ckpts.empty())
      throw ConfigError("pca: no checkpoints under " + dir.string());
    const std::string label =
        i < labels.size() ? labels[i] : fs::path(run_dirs[i]).filename().string();
    std::vector<std::vector<double>> traj;
    try {
      traj = evalx::load_trajectory(ckpts, true);
    } catch (const CheckpointError&) {
      traj = evalx::load_trajectory(ckpts, false);
    }
    runs.emplace_back(label, std::move(traj));
  }

  const auto pca = evalx::pca_weight_trajectories(runs);
  if (!out_csv.empty()) evalx::write_pca_csv(pca, out_csv);
  if (!out_svg.empty()) evalx::write_pca_svg(pca, out_svg);
  std::cout << "pca: " << pca.points.size() << " points, eigenvalues "
            << pca.eigenvalues[0] << " / " << pca.eigenvalues[1] << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital in-line holography simulation and reconstruction toolkit"};
  app.require_subcommand(1);

  std::string config_file;
  app.add_option("--config", config_file, "JSON config file")->expected(1);

  cli::RunConfig cfg;
  TargetArgs target;

  // simulate
  auto* sim = app.add_subcommand("simulate", "synthesize a target and its hologram");
  target.attach(sim);
  std::string sim_out, sim_truth, sim_truth_mask;
  int sim_bits = 16;
  double sigma_flag = -1.0;
  std::uint64_t noise_seed_flag = 0;
  bool noise_seed_set = false;
  sim->add_option("--out", sim_out, "output hologram image (.png/.pgm)")->required();
  sim->add_option("--truth", sim_truth, "write the true object field (HCF1)");
  sim->add_option("--truth-mask", sim_truth_mask, "write the background truth mask");
  sim->add_option("--bit-depth", sim_bits, "hologram bit depth (8 or 16)");
  sim->add_option("--sigma", sigma_flag, "noise level on the 0-255 scale");
  sim->add_option("--seed", noise_seed_flag, "noise seed")
      ->each([&](const std::string&) { noise_seed_set = true; });

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "recover the object wave from a hologram");
  std::string rec_input, rec_out, rec_init, rec_init_d;
  int it_flag = -1, k_flag = -1, ckpt_flag = -1;
  double l1_flag = -1.0, l2_flag = -1.0, lrg_flag = -1.0, lrd_flag = -1.0,
         t0_flag = -1.0;
  std::uint64_t seed_flag = 0;
  bool seed_set = false, no_mask = false, no_gan = false, no_sr = false,
       backprop_sqrt = false;
  rec->add_option("--input", rec_input, "hologram image")->required();
  rec->add_option("--out-dir", rec_out, "output directory")->required();
  rec->add_option("--init", rec_init, "generator checkpoint to warm start from");
  rec->add_option("--init-d", rec_init_d, "discriminator checkpoint to warm start from");
  rec->add_option("--iterations", it_flag, "training intervals");
  rec->add_option("--seed", seed_flag, "training seed")
      ->each([&](const std::string&) { seed_set = true; });
  rec->add_flag("--no-mask", no_mask, "disable adaptive background masking");
  rec->add_flag("--no-gan", no_gan, "plain autoencoder objective (no discriminator)");
  rec->add_flag("--no-sr", no_sr, "disable the super-resolution block");
  rec->add_flag("--backprop-sqrt", backprop_sqrt, "back-propagate sqrt(H) instead of H");
  rec->add_option("--lambda1", l1_flag, "hologram-consistency weight");
  rec->add_option("--lambda2", l2_flag, "background TV weight");
  rec->add_option("--lr-g", lrg_flag, "generator learning rate");
  rec->add_option("--lr-d", lrd_flag, "discriminator learning rate");
  rec->add_option("--k-interval", k_flag, "mask update cadence");
  rec->add_option("--t0-factor", t0_flag, "initial SA temperature factor");
  rec->add_option("--checkpoint-interval", ckpt_flag, "checkpoint cadence (0 = off)");

  // baseline
  auto* base = app.add_subcommand("baseline", "classical reference reconstructions");
  std::string base_method = "gs", base_input, base_out, base_support;
  int base_iters = 100;
  base->add_option("--method", base_method, "gs or backprop");
  base->add_option("--input", base_input, "hologram image")->required();
  base->add_option("--out-dir", base_out, "output directory")->required();
  base->add_option("--iters", base_iters, "GS iterations");
  base->add_option("--support", base_support, "object support mask (1 = object)");

  // eval
  auto* ev = app.add_subcommand("eval", "PSNR/SSIM between two images");
  std::string eval_a, eval_b, eval_metric = "both", eval_json;
  ev->add_option("--a", eval_a)->required();
  ev->add_option("--b", eval_b)->required();
  ev->add_option("--metric", eval_metric, "psnr|ssim|both");
  ev->add_option("--json", eval_json, "write metrics as JSON");

  // sweep-noise
  auto* sweep = app.add_subcommand("sweep-noise", "reconstruction quality vs noise level");
  target.attach(sweep);
  std::string sweep_sigmas = "0,5,10,15", sweep_out;
  sweep->add_option("--sigmas", sweep_sigmas, "comma-separated noise levels");
  sweep->add_option("--out-dir", sweep_out, "output directory")->required();

  // transfer
  auto* tr = app.add_subcommand("transfer", "one-shot/transfer-learning scenarios");
  target.attach(tr);
  std::string tr_seeds = "1,2,3,4", tr_out;
  int tr_extra = 500;
  tr->add_option("--seeds", tr_seeds, "4 pattern seeds for S1..S4");
  tr->add_option("--extra-iterations", tr_extra, "retraining budget per sample");
  tr->add_option("--out-dir", tr_out, "output directory")->required();

  // pca
  auto* pca = app.add_subcommand("pca", "PCA of checkpointed weight trajectories");
  std::vector<std::string> pca_runs;
  std::string pca_labels, pca_csv = "pca.csv", pca_svg;
  pca->add_option("--runs", pca_runs, "reconstruction output directories")->required();
  pca->add_option("--labels", pca_labels, "comma-separated run labels");
  pca->add_option("--out-csv", pca_csv, "scatter data CSV");
  pca->add_option("--out-svg", pca_svg, "scatter plot SVG");

  // Top-level options (e.g. --config) may appear after the subcommand name.
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_file.empty()) cfg.merge_file(config_file);

    // Flags override file values.
    if (sim->parsed() || sweep->parsed() || tr->parsed()) {
      if (sigma_flag >= 0.0) cfg.noise_sigma = sigma_flag;
      if (noise_seed_set) cfg.noise_seed = noise_seed_flag;
    }
    if (rec->parsed()) {
      cfg.input = rec_input;
      cfg.out_dir = rec_out;
      if (!rec_init.empty()) cfg.train.init_checkpoint = rec_init;
      if (!rec_init_d.empty()) cfg.train.init_checkpoint_d = rec_init_d;
      if (it_flag >= 0) cfg.train.iterations = it_flag;
      if (seed_set) cfg.train.seed = seed_flag;
      if (no_mask) cfg.train.masking_enabled = false;
      if (no_gan) cfg.train.gan_enabled = false;
      if (no_sr) cfg.train.sr_enabled = false;
      if (backprop_sqrt) cfg.train.backprop_sqrt = true;
      if (l1_flag >= 0.0) cfg.train.loss_weights.lambda1 = l1_flag;
      if (l2_flag >= 0.0) cfg.train.loss_weights.lambda2 = l2_flag;
      if (lrg_flag > 0.0) cfg.train.lr_g = lrg_flag;
      if (lrd_flag > 0.0) cfg.train.lr_d = lrd_flag;
      if (k_flag >= 1) cfg.train.mask_interval_k = k_flag;
      if (t0_flag > 0.0) cfg.train.t0_factor = t0_flag;
      if (ckpt_flag >= 0) cfg.train.checkpoint_interval = ckpt_flag;
    }
    cfg.apply_env();

    if (sim->parsed())
      return cmd_simulate(cfg, target, sim_out, sim_truth, sim_truth_mask, sim_bits);
    if (rec->parsed()) return cmd_reconstruct(cfg);
    if (base->parsed()) {
      cfg.input = base_input;
      cfg.out_dir = base_out;
      return cmd_baseline(cfg, base_method, base_iters, base_support);
    }
    if (ev->parsed()) return cmd_eval(eval_a, eval_b, eval_metric, eval_json);
    if (sweep->parsed()) {
      cfg.out_dir = sweep_out;
      return cmd_sweep_noise(cfg, target, sweep_sigmas);
    }
    if (tr->parsed()) {
      cfg.out_dir = tr_out;
      return cmd_transfer(cfg, target, tr_seeds, tr_extra);
    }
    if (pca->parsed()) return cmd_pca(pca_runs, pca_labels, pca_csv, pca_svg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ParamError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
