#include "holo/evalx.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "holo/errors.hpp"

namespace holo::evalx {

namespace {

using nlohmann::json;

void check_pair(size_t an, size_t bn, int h, int w) {
  if (an != bn || an != size_t(h) * w) throw DimensionError("image shape mismatch");
}

std::vector<double> pooled_amplitude(const trainer::ReconstructionResult& r,
                                     int out_h, int out_w) {
  if (r.height == out_h && r.width == out_w) {
    std::vector<double> a(r.amplitude);
    for (double& v : a) v = std::clamp(v, 0.0, 1.0);
    return a;
  }
  if (r.height != 2 * out_h || r.width != 2 * out_w)
    throw DimensionError("reconstruction grid does not match the truth grid");
  std::vector<double> a(size_t(out_h) * out_w);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x) {
      const size_t r0 = size_t(2 * y) * r.width + 2 * x;
      const size_t r1 = r0 + r.width;
      const double m = 0.25 * (r.amplitude[r0] + r.amplitude[r0 + 1] +
                               r.amplitude[r1] + r.amplitude[r1 + 1]);
      a[size_t(y) * out_w + x] = std::clamp(m, 0.0, 1.0);
    }
  return a;
}

}  // namespace

double psnr(std::span<const double> a, std::span<const double> b, int height, int width) {
  check_pair(a.size(), b.size(), height, width);
  double mse = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    mse += d * d;
  }
  mse /= double(a.size());
  if (mse <= 0.0) return 99.0;
  const double v = 10.0 * std::log10(1.0 / mse);
  return std::min(v, 99.0);
}

double ssim(std::span<const double> a, std::span<const double> b, int height, int width) {
  check_pair(a.size(), b.size(), height, width);
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  if (height < kWin || width < kWin)
    throw ParamError("ssim: image smaller than the 11x11 window");

  double kernel[kWin];
  double ksum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    const double d = i - (kWin - 1) / 2.0;
    kernel[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    ksum += kernel[i];
  }
  for (double& k : kernel) k /= ksum;

  // Separable Gaussian filtering, valid region only.
  const int vw = width - kWin + 1;
  const int vh = height - kWin + 1;
  auto filter = [&](auto&& value) {
    // horizontal pass then vertical pass
    std::vector<double> tmp(size_t(height) * vw);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < vw; ++x) {
        double s = 0.0;
        for (int k = 0; k < kWin; ++k) s += kernel[k] * value(y, x + k);
        tmp[size_t(y) * vw + x] = s;
      }
    std::vector<double> out(size_t(vh) * vw);
    for (int y = 0; y < vh; ++y)
      for (int x = 0; x < vw; ++x) {
        double s = 0.0;
        for (int k = 0; k < kWin; ++k) s += kernel[k] * tmp[size_t(y + k) * vw + x];
        out[size_t(y) * vw + x] = s;
      }
    return out;
  };

  const auto at = [width](std::span<const double> img, int y, int x) {
    return img[size_t(y) * width + x];
  };
  const auto mu_a = filter([&](int y, int x) { return at(a, y, x); });
  const auto mu_b = filter([&](int y, int x) { return at(b, y, x); });
  const auto aa = filter([&](int y, int x) { return at(a, y, x) * at(a, y, x); });
  const auto bb = filter([&](int y, int x) { return at(b, y, x) * at(b, y, x); });
  const auto ab = filter([&](int y, int x) { return at(a, y, x) * at(b, y, x); });

  double total = 0.0;
  for (size_t i = 0; i < mu_a.size(); ++i) {
    const double va = aa[i] - mu_a[i] * mu_a[i];
    const double vb = bb[i] - mu_b[i] * mu_b[i];
    const double cov = ab[i] - mu_a[i] * mu_b[i];
    const double num = (2.0 * mu_a[i] * mu_b[i] + kC1) * (2.0 * cov + kC2);
    const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) * (va + vb + kC2);
    total += num / den;
  }
  return total / double(mu_a.size());
}

double amplitude_psnr(const trainer::ReconstructionResult& r,
                      const ObjectTransmittance& truth) {
  const auto a = pooled_amplitude(r, truth.height, truth.width);
  return psnr(a, truth.attenuation, truth.height, truth.width);
}

double amplitude_ssim(const trainer::ReconstructionResult& r,
                      const ObjectTransmittance& truth) {
  const auto a = pooled_amplitude(r, truth.height, truth.width);
  return ssim(a, truth.attenuation, truth.height, truth.width);
}

std::string MetricReport::to_json() const {
  json j;
  j["scenario"] = scenario;
  j["config"] = config_echo.empty() ? json(nullptr) : json::parse(config_echo);
  json jr = json::array();
  for (const auto& r : runs)
    jr.push_back(json{{"method", r.method},
                      {"sigma", r.sigma},
                      {"iterations", r.iterations},
                      {"psnr_db", r.psnr_db},
                      {"ssim", r.ssim},
                      {"wall_time_s", r.wall_time_s},
                      {"seed", r.seed}});
  j["runs"] = std::move(jr);
  return j.dump(2);
}

std::string MetricReport::to_table() const {
  std::ostringstream os;
  os << "scenario: " << scenario << "\n";
  os << "method                       sigma  iters   PSNR(dB)    SSIM    time(s)\n";
  os << "-----------------------------------------------------------------------\n";
  char line[160];
  for (const auto& r : runs) {
    std::snprintf(line, sizeof(line), "%-28s %5.1f %6d %9.3f %8.4f %9.1f\n",
                  r.method.c_str(), r.sigma, r.iterations, r.psnr_db, r.ssim,
                  r.wall_time_s);
    os << line;
  }
  return os.str();
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json optics_echo(const OpticsConfig& o) {
  return json{{"wavelength_um", o.wavelength_um},
              {"pixel_um", o.pixel_um},
              {"z_um", o.z_um},
              {"height", o.height},
              {"width", o.width}};
}

json train_echo(const trainer::TrainConfig& c) {
  return json{{"iterations", c.iterations},
              {"d_steps_per_interval", c.d_steps_per_interval},
              {"mask_interval_k", c.mask_interval_k},
              {"lr_g", c.lr_g},
              {"lr_d", c.lr_d},
              {"adam_beta1", c.adam_beta1},
              {"adam_beta2", c.adam_beta2},
              {"lambda1", c.loss_weights.lambda1},
              {"lambda2", c.loss_weights.lambda2},
              {"seed", c.seed},
              {"sr_enabled", c.sr_enabled},
              {"t0_factor", c.t0_factor},
              {"masking_enabled", c.masking_enabled},
              {"gan_enabled", c.gan_enabled},
              {"backprop_sqrt", c.backprop_sqrt}};
}

}  // namespace

MetricReport run_noise_sweep(const ObjectTransmittance& target,
                             const OpticsConfig& optics,
                             const trainer::TrainConfig& cfg,
                             const std::vector<double>& sigmas,
                             std::uint64_t noise_seed) {
  MetricReport report;
  report.scenario = "noise_sweep";
  json echo{{"optics", optics_echo(optics)},
            {"train", train_echo(cfg)},
            {"sigmas", sigmas},
            {"noise_seed", noise_seed}};
  report.config_echo = echo.dump();

  const Hologram clean = optics::form_hologram(target, optics);
  for (double sigma : sigmas) {
    const Hologram noisy = optics::add_noise(clean, sigma, noise_seed);
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = trainer::reconstruct(noisy, optics, cfg);
    RunRecord r;
    r.method = "ours";
    r.sigma = sigma;
    r.iterations = cfg.iterations;
    r.psnr_db = amplitude_psnr(res, target);
    r.ssim = amplitude_ssim(res, target);
    r.wall_time_s = seconds_since(t0);
    r.seed = cfg.seed;
    report.runs.push_back(std::move(r));
  }
  return report;
}

namespace {

RunRecord score_result(const std::string& method, const trainer::ReconstructionResult& res,
                       const TransferSample& sample, int iterations, std::uint64_t seed,
                       double wall_s) {
  // Truth amplitudes come on the capture grid.
  ObjectTransmittance truth;
  truth.height = sample.hologram.height;
  truth.width = sample.hologram.width;
  truth.attenuation = sample.truth_amplitude;
  RunRecord r;
  r.method = method + ":" + sample.label;
  r.iterations = iterations;
  r.psnr_db = amplitude_psnr(res, truth);
  r.ssim = amplitude_ssim(res, truth);
  r.wall_time_s = wall_s;
  r.seed = seed;
  return r;
}

}  // namespace

MetricReport run_transfer_experiment(const std::vector<TransferSample>& samples,
                                     const OpticsConfig& optics,
                                     const trainer::TrainConfig& cfg,
                                     int extra_iterations,
                                     const std::filesystem::path& work_dir) {
  if (samples.size() != 4)
    throw ParamError("transfer experiment expects exactly 4 samples (S1..S4)");
  namespace fs = std::filesystem;
  fs::create_directories(work_dir);

  MetricReport report;
  report.scenario = "transfer_learning";
  json echo{{"optics", optics_echo(optics)},
            {"train", train_echo(cfg)},
            {"extra_iterations", extra_iterations}};
  report.config_echo = echo.dump();

  // Scenario I: one-shot training on S1.
  trainer::TrainConfig cfg_s1 = cfg;
  cfg_s1.out_dir = work_dir / "s1_train";
  cfg_s1.checkpoint_interval = cfg.checkpoint_interval;
  auto t0 = std::chrono::steady_clock::now();
  const auto res_s1 = trainer::reconstruct(samples[0].hologram, optics, cfg_s1);
  report.runs.push_back(score_result("one_shot_train", res_s1, samples[0],
                                     cfg.iterations, cfg.seed, seconds_since(t0)));
  const fs::path s1_ckpt = work_dir / "s1_train" / "checkpoints" / "final" / "generator";

  for (size_t i = 1; i < samples.size(); ++i) {
    // Scenario I continued: frozen generator applied to the new sample.
    trainer::TrainConfig cfg_apply = cfg;
    cfg_apply.iterations = 0;
    cfg_apply.init_checkpoint = s1_ckpt;
    cfg_apply.out_dir.clear();
    t0 = std::chrono::steady_clock::now();
    const auto res_apply = trainer::reconstruct(samples[i].hologram, optics, cfg_apply);
    report.runs.push_back(score_result("one_shot_train", res_apply, samples[i], 0,
                                       cfg.seed, seconds_since(t0)));

    // Scenario II: random init, extra_iterations only.
    trainer::TrainConfig cfg_rand = cfg;
    cfg_rand.iterations = extra_iterations;
    cfg_rand.seed = Rng::derive(cfg.seed, 100 + i);
    cfg_rand.out_dir.clear();
    t0 = std::chrono::steady_clock::now();
    const auto res_rand = trainer::reconstruct(samples[i].hologram, optics, cfg_rand);
    report.runs.push_back(score_result("retrain", res_rand, samples[i],
                                       extra_iterations, cfg_rand.seed,
                                       seconds_since(t0)));

    // Scenario III: warm start from S1, extra_iterations.
    trainer::TrainConfig cfg_warm = cfg_rand;
    cfg_warm.init_checkpoint = s1_ckpt;
    t0 = std::chrono::steady_clock::now();
    const auto res_warm = trainer::reconstruct(samples[i].hologram, optics, cfg_warm);
    report.runs.push_back(score_result("one_shot_train_plus", res_warm, samples[i],
                                       extra_iterations, cfg_warm.seed,
                                       seconds_since(t0)));
  }
  return report;
}

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major n x n).
// Returns eigenvalues (descending) and the matching eigenvectors as rows.
void jacobi_eigen(std::vector<double> a, int n, std::vector<double>& eigvals,
                  std::vector<double>& eigvecs_rows) {
  std::vector<double> v(size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[size_t(i) * n + i] = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[size_t(p) * n + q] * a[size_t(p) * n + q];
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[size_t(p) * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double app = a[size_t(p) * n + p];
        const double aqq = a[size_t(q) * n + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[size_t(k) * n + p];
          const double akq = a[size_t(k) * n + q];
          a[size_t(k) * n + p] = c * akp - s * akq;
          a[size_t(k) * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[size_t(p) * n + k];
          const double aqk = a[size_t(q) * n + k];
          a[size_t(p) * n + k] = c * apk - s * aqk;
          a[size_t(q) * n + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v[size_t(k) * n + p];
          const double vkq = v[size_t(k) * n + q];
          v[size_t(k) * n + p] = c * vkp - s * vkq;
          v[size_t(k) * n + q] = s * vkp + c * vkq;
        }
      }
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return a[size_t(x) * n + x] > a[size_t(y) * n + y];
  });
  eigvals.resize(n);
  eigvecs_rows.assign(size_t(n) * n, 0.0);
  for (int r = 0; r < n; ++r) {
    eigvals[r] = a[size_t(order[r]) * n + order[r]];
    for (int k = 0; k < n; ++k) eigvecs_rows[size_t(r) * n + k] = v[size_t(k) * n + order[r]];
  }
}

}  // namespace

PcaResult pca_weight_trajectories(
    const std::vector<std::pair<std::string, std::vector<std::vector<double>>>>& runs,
    bool want_components) {
  size_t dim = 0;
  size_t m = 0;
  for (const auto& [label, vecs] : runs) {
    for (const auto& v : vecs) {
      if (dim == 0) dim = v.size();
      if (v.size() != dim)
        throw ParamError("pca: weight vectors have mixed lengths (mixed architectures?)");
      ++m;
    }
  }
  if (m == 0 || dim == 0) throw ParamError("pca: no weight vectors given");

  // Center the stacked data.
  std::vector<double> mean(dim, 0.0);
  for (const auto& [label, vecs] : runs)
    for (const auto& v : vecs)
      for (size_t j = 0; j < dim; ++j) mean[j] += v[j];
  for (double& x : mean) x /= double(m);

  std::vector<std::vector<double>> centered;
  centered.reserve(m);
  std::vector<std::string> labels;
  for (const auto& [label, vecs] : runs)
    for (const auto& v : vecs) {
      std::vector<double> c(dim);
      for (size_t j = 0; j < dim; ++j) c[j] = v[j] - mean[j];
      centered.push_back(std::move(c));
      labels.push_back(label);
    }

  // Gram matrix of the centered rows.
  const int n = int(m);
  std::vector<double> gram(size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.0;
      for (size_t k = 0; k < dim; ++k) s += centered[i][k] * centered[j][k];
      gram[size_t(i) * n + j] = s;
      gram[size_t(j) * n + i] = s;
    }

  std::vector<double> eigvals, eigvecs;
  jacobi_eigen(std::move(gram), n, eigvals, eigvecs);

  PcaResult out;
  out.eigenvalues = {std::max(eigvals[0], 0.0),
                     n > 1 ? std::max(eigvals[1], 0.0) : 0.0};
  std::array<double, 2> sigma{std::sqrt(out.eigenvalues[0]),
                              std::sqrt(out.eigenvalues[1])};

  // Deterministic sign: first entry of each eigenvector non-negative.
  for (int r = 0; r < 2 && r < n; ++r) {
    int lead = 0;
    while (lead < n && std::abs(eigvecs[size_t(r) * n + lead]) < 1e-12) ++lead;
    if (lead < n && eigvecs[size_t(r) * n + lead] < 0.0)
      for (int k = 0; k < n; ++k) eigvecs[size_t(r) * n + k] = -eigvecs[size_t(r) * n + k];
  }

  out.points.resize(m);
  for (int i = 0; i < n; ++i) {
    out.points[i].label = labels[i];
    out.points[i].pc1 = sigma[0] > 0.0 ? eigvecs[size_t(0) * n + i] * sigma[0] : 0.0;
    out.points[i].pc2 = (n > 1 && sigma[1] > 0.0) ? eigvecs[size_t(1) * n + i] * sigma[1] : 0.0;
  }

  if (want_components) {
    out.components.assign(2, std::vector<double>(dim, 0.0));
    for (int r = 0; r < 2 && r < n; ++r) {
      if (sigma[r] <= 0.0) continue;
      for (int i = 0; i < n; ++i) {
        const double u = eigvecs[size_t(r) * n + i];
        for (size_t k = 0; k < dim; ++k) out.components[r][k] += u * centered[i][k];
      }
      for (size_t k = 0; k < dim; ++k) out.components[r][k] /= sigma[r];
    }
  }
  return out;
}

std::vector<std::vector<double>> load_trajectory(
    const std::vector<std::filesystem::path>& checkpoint_dirs, bool sr_enabled) {
  std::vector<std::vector<double>> out;
  auto net = nets::build_generator<float>(sr_enabled, 0);
  for (const auto& dir : checkpoint_dirs) {
    nets::load_params(net, dir);
    out.push_back(nets::flatten_params(net));
  }
  return out;
}

void write_pca_csv(const PcaResult& pca, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "label,pc1,pc2\n";
  for (const auto& p : pca.points)
    os << p.label << "," << p.pc1 << "," << p.pc2 << "\n";
}

void write_pca_svg(const PcaResult& pca, const std::filesystem::path& path) {
  double lo = 0.0, hi = 0.0;
  for (const auto& p : pca.points) {
    lo = std::min({lo, p.pc1, p.pc2});
    hi = std::max({hi, p.pc1, p.pc2});
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const int size = 640;
  auto sx = [&](double v) { return (v - lo) / (hi - lo) * size; };
  auto sy = [&](double v) { return size - (v - lo) / (hi - lo) * size; };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  std::map<std::string, int> color_of;
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\""
     << size << "\" viewBox=\"0 0 " << size << " " << size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& p : pca.points) {
    auto [it, fresh] = color_of.try_emplace(p.label, int(color_of.size()) % 8);
    (void)fresh;
    os << "<circle cx=\"" << sx(p.pc1) << "\" cy=\"" << sy(p.pc2)
       << "\" r=\"4\" fill=\"" << kColors[it->second] << "\"><title>" << p.label
       << "</title></circle>\n";
  }
  int row = 0;
  for (const auto& [label, color] : color_of) {
    os << "<circle cx=\"16\" cy=\"" << 16 + row * 18 << "\" r=\"5\" fill=\""
       << kColors[color] << "\"/><text x=\"26\" y=\"" << 21 + row * 18
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << label << "</text>\n";
    ++row;
  }
  os << "</svg>\n";
}

}  // namespace holo::evalx
