#include "holo/trainer.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "holo/fft.hpp"
#include "holo/image_io.hpp"
#include "holo/rng.hpp"

namespace holo::trainer {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void TrainConfig::validate() const {
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (d_steps_per_interval < 0) throw ConfigError("d_steps_per_interval must be >= 0");
  if (mask_interval_k < 1) throw ConfigError("mask_interval_k must be >= 1");
  if (!(lr_g > 0.0) || !(lr_d > 0.0)) throw ConfigError("learning rates must be > 0");
  if (!(t0_factor > 0.0)) throw ConfigError("t0_factor must be > 0");
  if (loss_weights.lambda1 < 0.0 || loss_weights.lambda2 < 0.0)
    throw ConfigError("loss weights must be >= 0");
  if (checkpoint_interval < 0) throw ConfigError("checkpoint_interval must be >= 0");
}

struct Session::Impl {
  TrainConfig cfg;
  OpticsConfig capture_optics;  // padded capture grid
  int orig_h = 0, orig_w = 0;   // before padding
  int cap_h = 0, cap_w = 0;     // padded capture grid
  int rec_h = 0, rec_w = 0;     // reconstruction grid (2x when SR)
  int scale = 1;

  Hologram h_padded;                 // normalized, padded
  std::vector<float> h_values;       // capture grid, float
  Tensor<float> net_input;           // (1, 2, cap_h, cap_w)
  std::vector<std::complex<double>> tf_fwd, tf_bwd;  // recon-grid transfer values

  nets::Network<float> gen, dis;
  std::unique_ptr<nets::Adam<float>> opt_g, opt_d;

  masking::MaskState mask_state;
  bool t0_initialized = false;

  int interval = 0;
  int g_updates = 0, d_updates = 0, mask_attempts_n = 0;
  std::vector<IntervalRecord> history;
  std::vector<std::filesystem::path> checkpoints;

  // scratch
  std::vector<std::complex<double>> cbuf;   // recon grid
  std::vector<double> h_raw;                // |U|^2 at recon grid
  std::vector<float> hhat;        // reproduced hologram, capture grid
  std::vector<double> amp_fresh;  // |O| at the reconstruction grid
  Tensor<float> d_single, d_batch, g_score, g_out_grad;
  Tensor<float> g_hhat;

  void propagate_buf(const std::vector<std::complex<double>>& tf) {
    fft::forward(cbuf.data(), rec_h, rec_w);
    for (size_t i = 0; i < cbuf.size(); ++i) cbuf[i] *= tf[i];
    fft::inverse(cbuf.data(), rec_h, rec_w);
  }

  // O (float 2ch) -> U in cbuf, |U|^2 in h_raw, pooled intensity in out.
  void sensor_intensity(const Tensor<float>& o, std::vector<float>& out) {
    const size_t n = size_t(rec_h) * rec_w;
    const float* z = o.data();  // interleaved (re, im)
    for (size_t i = 0; i < n; ++i) cbuf[i] = {double(z[2 * i]), double(z[2 * i + 1])};
    propagate_buf(tf_fwd);
    h_raw.resize(n);
    for (size_t i = 0; i < n; ++i) h_raw[i] = std::norm(cbuf[i]);
    out.resize(size_t(cap_h) * cap_w);
    if (scale == 1) {
      for (size_t i = 0; i < out.size(); ++i) out[i] = float(h_raw[i]);
    } else {
      for (int y = 0; y < cap_h; ++y)
        for (int x = 0; x < cap_w; ++x) {
          const size_t r0 = size_t(2 * y) * rec_w + 2 * x;
          const size_t r1 = r0 + rec_w;
          out[size_t(y) * cap_w + x] =
              float(0.25 * (h_raw[r0] + h_raw[r0 + 1] + h_raw[r1] + h_raw[r1 + 1]));
        }
    }
  }

  double fake_score_and_input_grad(const std::vector<float>& hh, Tensor<float>& ghhat) {
    d_single.ensure(1, cap_h, cap_w, 2);
    float* in = d_single.data();
    for (size_t i = 0; i < hh.size(); ++i) {
      in[2 * i] = hh[i];
      in[2 * i + 1] = 0.0f;
    }
    const Tensor<float>& s = dis.forward(d_single, false);
    const double score = s[0];
    g_score.ensure(1, 1, 1, 1);
    g_score[0] = float(objective::d_neg_log_sigmoid(score));
    const Tensor<float>& gin = dis.backward_to_input(g_score, false);
    const float* g0 = gin.data();
    float* acc = ghhat.data();
    for (size_t i = 0; i < hh.size(); ++i) acc[i] += g0[2 * i];
    return score;
  }

  // dL/d(pooled intensity) -> dL/dO via the adjoint of pool, |.|^2 and
  // propagation; adds the background-TV term and backpropagates through G.
  void generator_backward(const Tensor<float>& o, const Tensor<float>& ghhat) {
    const size_t n = size_t(rec_h) * rec_w;
    std::vector<double> g_raw(n);
    if (scale == 1) {
      const float* g = ghhat.data();
      for (size_t i = 0; i < n; ++i) g_raw[i] = g[i];
    } else {
      for (int y = 0; y < cap_h; ++y)
        for (int x = 0; x < cap_w; ++x) {
          const double g = 0.25 * ghhat[size_t(y) * cap_w + x];
          const size_t r0 = size_t(2 * y) * rec_w + 2 * x;
          g_raw[r0] = g;
          g_raw[r0 + 1] = g;
          g_raw[r0 + rec_w] = g;
          g_raw[r0 + rec_w + 1] = g;
        }
    }
    // cbuf still holds U = P_z(O); d|U|^2 packs to 2 * g * U, and the
    // adjoint of the unitary propagation is propagation by -z.
    for (size_t i = 0; i < n; ++i) cbuf[i] *= 2.0 * g_raw[i];
    propagate_buf(tf_bwd);

    g_out_grad.ensure(1, rec_h, rec_w, 2);
    float* gz = g_out_grad.data();
    for (size_t i = 0; i < n; ++i) {
      gz[2 * i] = float(cbuf[i].real());
      gz[2 * i + 1] = float(cbuf[i].imag());
    }
    if (cfg.loss_weights.lambda2 > 0.0)
      objective::tv_background_grad(o, mask_state.mask, cfg.loss_weights.lambda2,
                                    g_out_grad);
    gen.backward(g_out_grad, true);
  }

  Hologram hologram_from(const std::vector<float>& v) const {
    Hologram h(cap_h, cap_w);
    for (size_t i = 0; i < v.size(); ++i) h.values[i] = v[i];
    return h;
  }

  void check_finite(double v, const char* what) const {
    if (!std::isfinite(v))
      throw DivergenceError(std::string(what) + " became non-finite at interval " +
                            std::to_string(interval));
  }
};

namespace {

Hologram pad_to_multiple_of_8(const Hologram& h) {
  const int ph = (8 - h.height % 8) % 8;
  const int pw = (8 - h.width % 8) % 8;
  if (ph == 0 && pw == 0) {
    Hologram out = h;
    out.normalize();
    return out;
  }
  Hologram out(h.height + ph, h.width + pw);
  auto reflect = [](int i, int n) { return i < n ? i : 2 * n - 2 - i; };
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      out.values[size_t(y) * out.width + x] =
          h.values[size_t(reflect(y, h.height)) * h.width + reflect(x, h.width)];
  out.normalize();
  return out;
}

}  // namespace

Session::Session(const Hologram& hologram, const OpticsConfig& optics,
                 const TrainConfig& cfg)
    : impl_(std::make_unique<Impl>()) {
  cfg.validate();
  auto& s = *impl_;
  s.cfg = cfg;
  s.orig_h = hologram.height;
  s.orig_w = hologram.width;
  if (s.orig_h < 8 || s.orig_w < 8)
    throw DimensionError("hologram must be at least 8x8");

  s.h_padded = pad_to_multiple_of_8(hologram);
  s.cap_h = s.h_padded.height;
  s.cap_w = s.h_padded.width;
  s.capture_optics = optics;
  s.capture_optics.height = s.cap_h;
  s.capture_optics.width = s.cap_w;
  s.capture_optics.validate();

  s.scale = cfg.sr_enabled ? 2 : 1;
  s.rec_h = s.cap_h * s.scale;
  s.rec_w = s.cap_w * s.scale;

  s.h_values.resize(s.h_padded.values.size());
  for (size_t i = 0; i < s.h_values.size(); ++i)
    s.h_values[i] = float(s.h_padded.values[i]);

  // Fixed network input: the back-propagated capture.
  const ComplexField bp =
      optics::back_propagate(s.h_padded, s.capture_optics, cfg.backprop_sqrt);
  s.net_input.ensure(1, s.cap_h, s.cap_w, 2);
  for (size_t i = 0; i < bp.size(); ++i) {
    s.net_input[2 * i] = float(bp.re[i]);
    s.net_input[2 * i + 1] = float(bp.im[i]);
  }

  OpticsConfig rec_optics = s.capture_optics;
  rec_optics.height = s.rec_h;
  rec_optics.width = s.rec_w;
  rec_optics.pixel_um = optics.pixel_um / s.scale;
  const TransferFunction fwd = optics::transfer_function(rec_optics, rec_optics.z_um);
  const TransferFunction bwd = optics::transfer_function(rec_optics, -rec_optics.z_um);
  s.tf_fwd = fwd.values;
  s.tf_bwd = bwd.values;
  s.cbuf.resize(size_t(s.rec_h) * s.rec_w);

  s.gen = nets::build_generator<float>(cfg.sr_enabled, Rng::derive(cfg.seed, 1));
  s.dis = nets::build_discriminator<float>(Rng::derive(cfg.seed, 2));
  if (!cfg.init_checkpoint.empty()) nets::load_params(s.gen, cfg.init_checkpoint);
  if (!cfg.init_checkpoint_d.empty()) nets::load_params(s.dis, cfg.init_checkpoint_d);
  s.opt_g = std::make_unique<nets::Adam<float>>(s.gen.params(), cfg.lr_g,
                                                cfg.adam_beta1, cfg.adam_beta2);
  s.opt_d = std::make_unique<nets::Adam<float>>(s.dis.params(), cfg.lr_d,
                                                cfg.adam_beta1, cfg.adam_beta2);

  s.mask_state = masking::MaskState::initial(s.rec_h, s.rec_w, 1.0);
}

Session::~Session() = default;
Session::Session(Session&&) noexcept = default;

void Session::run_interval() {
  auto& s = *impl_;
  s.interval += 1;
  IntervalRecord rec;
  rec.interval = s.interval;

  // (1) one generator update
  s.gen.zero_grads();
  const Tensor<float>& o = s.gen.forward(s.net_input, true);
  s.sensor_intensity(o, s.hhat);
  rec.loss_auto =
      objective::mse_flat(s.h_values.data(), s.hhat.data(), s.hhat.size());
  rec.loss_b = objective::tv_background(o, s.mask_state.mask);

  s.g_hhat.ensure(1, s.cap_h, s.cap_w, 1);
  s.g_hhat.zero();
  double adv = 0.0;
  if (s.cfg.gan_enabled) {
    const double score = s.fake_score_and_input_grad(s.hhat, s.g_hhat);
    adv = objective::neg_log_sigmoid(score);
  }
  objective::mse_grad_flat(s.h_values.data(), s.hhat.data(), s.hhat.size(),
                           s.cfg.loss_weights.lambda1, s.g_hhat.data());
  s.generator_backward(o, s.g_hhat);
  s.opt_g->step();
  s.g_updates += 1;

  rec.loss_g = adv + s.cfg.loss_weights.lambda1 * rec.loss_auto +
               s.cfg.loss_weights.lambda2 * rec.loss_b;
  s.check_finite(rec.loss_g, "generator loss");

  // The interval's forward pass (o, hhat) also feeds the mask step and the
  // discriminator fakes below; the generator stays frozen for both.
  const size_t rn = size_t(s.rec_h) * s.rec_w;
  s.amp_fresh.resize(rn);
  {
    const float* z = o.data();
    for (size_t i = 0; i < rn; ++i)
      s.amp_fresh[i] = std::hypot(double(z[2 * i]), double(z[2 * i + 1]));
  }

  // (2) mask update, between the generator and discriminator steps
  if (s.cfg.masking_enabled && s.interval % s.cfg.mask_interval_k == 0) {
    const Mask proposal = masking::kmeans2_segment(s.amp_fresh, s.rec_h, s.rec_w);
    const Hologram hhat_h = s.hologram_from(s.hhat);
    if (!s.t0_initialized) {
      const double global_mse = masking::masked_mse(
          s.h_padded, hhat_h, Mask(s.rec_h, s.rec_w, 1));
      s.mask_state.temperature = std::max(s.cfg.t0_factor * global_mse, 1e-12);
      s.t0_initialized = true;
    }
    const auto res = masking::sa_update(
        s.mask_state, proposal, s.h_padded, hhat_h,
        Rng::derive(s.cfg.seed, 0x6d61736bULL + std::uint64_t(s.interval)));
    s.mask_state = res.state;
    rec.mask_accepted = res.accepted;
    s.mask_attempts_n += 1;
  }
  rec.temperature = s.mask_state.temperature;

  // (3) discriminator updates with the generator frozen
  if (s.cfg.gan_enabled && s.cfg.d_steps_per_interval > 0) {
    s.d_batch.ensure(2, s.cap_h, s.cap_w, 2);
    float* real_in = s.d_batch.sample(0);
    float* fake_in = s.d_batch.sample(1);
    for (size_t i = 0; i < s.h_values.size(); ++i) {
      real_in[2 * i] = s.h_values[i];
      real_in[2 * i + 1] = 0.0f;
      fake_in[2 * i] = s.hhat[i];
      fake_in[2 * i + 1] = 0.0f;
    }

    double d_loss_sum = 0.0;
    for (int j = 0; j < s.cfg.d_steps_per_interval; ++j) {
      s.dis.zero_grads();
      const Tensor<float>& scores = s.dis.forward(s.d_batch, true);
      const double s_real = scores.at(0, 0, 0, 0);
      const double s_fake = scores.at(1, 0, 0, 0);
      const double ld = objective::loss_discriminator(s_real, s_fake);
      s.check_finite(ld, "discriminator loss");
      s.g_score.ensure(2, 1, 1, 1);
      s.g_score[0] = float(objective::d_neg_log_sigmoid(s_real));
      s.g_score[1] = float(objective::d_neg_log_one_minus_sigmoid(s_fake));
      s.dis.backward(s.g_score, true);
      s.opt_d->step();
      s.d_updates += 1;
      d_loss_sum += ld;
    }
    rec.loss_d = d_loss_sum / s.cfg.d_steps_per_interval;
  }

  s.history.push_back(rec);

  if (!s.cfg.out_dir.empty() && s.cfg.checkpoint_interval > 0 &&
      s.interval % s.cfg.checkpoint_interval == 0) {
    char name[32];
    std::snprintf(name, sizeof(name), "ckpt_%06d", s.interval);
    const auto dir = s.cfg.out_dir / "checkpoints" / name;
    std::filesystem::create_directories(dir.parent_path());
    nets::persist_params(s.gen, dir, {s.interval, s.cfg.seed});
    s.checkpoints.push_back(dir);
  }
}

ReconstructionResult Session::finish() {
  auto& s = *impl_;
  ReconstructionResult r;

  const Tensor<float>& o = s.gen.forward(s.net_input, false);
  const int ch = s.orig_h * s.scale;
  const int cw = s.orig_w * s.scale;
  r.height = ch;
  r.width = cw;
  r.object_wave = ComplexField(ch, cw);
  r.final_mask = Mask(ch, cw, 1);
  const float* z = o.data();
  for (int y = 0; y < ch; ++y)
    for (int x = 0; x < cw; ++x) {
      const size_t src = size_t(y) * s.rec_w + x;
      const size_t dst = size_t(y) * cw + x;
      r.object_wave.re[dst] = z[2 * src];
      r.object_wave.im[dst] = z[2 * src + 1];
      r.final_mask.values[dst] = s.mask_state.mask.values[src];
    }
  r.amplitude = r.object_wave.amplitude();
  r.phase = r.object_wave.phase();
  r.history = s.history;
  r.checkpoints = s.checkpoints;

  if (!s.cfg.out_dir.empty()) {
    write_result_files(r, s.cfg.out_dir);
    const auto final_dir = s.cfg.out_dir / "checkpoints" / "final";
    std::filesystem::create_directories(final_dir);
    nets::persist_params(s.gen, final_dir / "generator", {s.interval, s.cfg.seed});
    nets::persist_params(s.dis, final_dir / "discriminator", {s.interval, s.cfg.seed});
    r.checkpoints.push_back(final_dir / "generator");
  }
  return r;
}

int Session::interval() const { return impl_->interval; }
const std::vector<IntervalRecord>& Session::history() const { return impl_->history; }
int Session::generator_updates() const { return impl_->g_updates; }
int Session::discriminator_updates() const { return impl_->d_updates; }
int Session::mask_attempts() const { return impl_->mask_attempts_n; }
const masking::MaskState& Session::mask_state() const { return impl_->mask_state; }
nets::Network<float>& Session::generator() { return impl_->gen; }
nets::Network<float>& Session::discriminator() { return impl_->dis; }

ReconstructionResult reconstruct(const Hologram& hologram, const OpticsConfig& optics,
                                 const TrainConfig& cfg) {
  Session session(hologram, optics, cfg);
  for (int i = 0; i < cfg.iterations; ++i) session.run_interval();
  return session.finish();
}

std::vector<double> phase_to_unit(const std::vector<double>& phase) {
  std::vector<double> unit(phase.size());
  for (size_t i = 0; i < phase.size(); ++i) unit[i] = (phase[i] + kPi) / (2.0 * kPi);
  return unit;
}

void write_result_files(const ReconstructionResult& result,
                        const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::vector<double> amp_unit(result.amplitude.size());
  for (size_t i = 0; i < amp_unit.size(); ++i)
    amp_unit[i] = std::clamp(result.amplitude[i], 0.0, 1.0);
  io::write_gray(out_dir / "amplitude.png",
                 io::quantize16(amp_unit, result.height, result.width));
  io::write_gray(out_dir / "phase.png",
                 io::quantize16(phase_to_unit(result.phase), result.height, result.width));
  save_hcf(result.object_wave, out_dir / "object_wave.hcf");
  save_mask(result.final_mask, out_dir / "mask.png");

  std::ofstream os(out_dir / "history.jsonl");
  if (!os) throw IoError("cannot write history.jsonl");
  for (const auto& rec : result.history) {
    nlohmann::json j{{"interval", rec.interval}, {"loss_g", rec.loss_g},
                     {"loss_d", rec.loss_d},     {"loss_auto", rec.loss_auto},
                     {"loss_b", rec.loss_b},     {"temperature", rec.temperature}};
    j["mask_accepted"] =
        rec.mask_accepted.has_value() ? nlohmann::json(*rec.mask_accepted)
                                      : nlohmann::json(nullptr);
    os << j.dump() << "\n";
  }
}

}  // namespace holo::trainer
