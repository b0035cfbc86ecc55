// pybind11 bindings exposing the main operations: simulation, propagation,
// reconstruction, baselines and metrics on numpy arrays.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "holo/baselines.hpp"
#include "holo/evalx.hpp"
#include "holo/trainer.hpp"

namespace py = pybind11;
using namespace holo;

namespace {

using ComplexArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;
using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

ComplexField field_from_numpy(const ComplexArray& arr) {
  if (arr.ndim() != 2) throw DimensionError("expected a 2D complex array");
  ComplexField f(int(arr.shape(0)), int(arr.shape(1)));
  const auto* p = arr.data();
  for (size_t i = 0; i < f.size(); ++i) {
    f.re[i] = p[i].real();
    f.im[i] = p[i].imag();
  }
  return f;
}

ComplexArray field_to_numpy(const ComplexField& f) {
  ComplexArray arr({f.height, f.width});
  auto* p = arr.mutable_data();
  for (size_t i = 0; i < f.size(); ++i) p[i] = {f.re[i], f.im[i]};
  return arr;
}

Hologram hologram_from_numpy(const RealArray& arr, bool renormalize) {
  if (arr.ndim() != 2) throw DimensionError("expected a 2D real array");
  Hologram h(int(arr.shape(0)), int(arr.shape(1)));
  const double* p = arr.data();
  std::copy(p, p + h.values.size(), h.values.begin());
  if (renormalize) h.normalize();
  return h;
}

RealArray to_numpy(const std::vector<double>& v, int h, int w) {
  RealArray arr({h, w});
  std::copy(v.begin(), v.end(), arr.mutable_data());
  return arr;
}

OpticsConfig optics_for(double wavelength_um, double pixel_um, double z_um, int h, int w) {
  OpticsConfig cfg;
  cfg.wavelength_um = wavelength_um;
  cfg.pixel_um = pixel_um;
  cfg.z_um = z_um;
  cfg.height = h;
  cfg.width = w;
  return cfg;
}

trainer::TrainConfig train_config_from_kwargs(const py::dict& kw) {
  trainer::TrainConfig cfg;
  for (auto item : kw) {
    const std::string key = py::str(item.first);
    const auto& v = item.second;
    if (key == "iterations") cfg.iterations = v.cast<int>();
    else if (key == "d_steps_per_interval") cfg.d_steps_per_interval = v.cast<int>();
    else if (key == "mask_interval_k") cfg.mask_interval_k = v.cast<int>();
    else if (key == "lr_g") cfg.lr_g = v.cast<double>();
    else if (key == "lr_d") cfg.lr_d = v.cast<double>();
    else if (key == "adam_beta1") cfg.adam_beta1 = v.cast<double>();
    else if (key == "adam_beta2") cfg.adam_beta2 = v.cast<double>();
    else if (key == "lambda1") cfg.loss_weights.lambda1 = v.cast<double>();
    else if (key == "lambda2") cfg.loss_weights.lambda2 = v.cast<double>();
    else if (key == "seed") cfg.seed = v.cast<std::uint64_t>();
    else if (key == "sr_enabled") cfg.sr_enabled = v.cast<bool>();
    else if (key == "t0_factor") cfg.t0_factor = v.cast<double>();
    else if (key == "masking_enabled") cfg.masking_enabled = v.cast<bool>();
    else if (key == "gan_enabled") cfg.gan_enabled = v.cast<bool>();
    else if (key == "backprop_sqrt") cfg.backprop_sqrt = v.cast<bool>();
    else if (key == "checkpoint_interval") cfg.checkpoint_interval = v.cast<int>();
    else if (key == "init_checkpoint") cfg.init_checkpoint = v.cast<std::string>();
    else if (key == "out_dir") cfg.out_dir = v.cast<std::string>();
    else throw ConfigError("unknown train option: " + key);
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_holo, m) {
  m.doc() = "Digital in-line holography: simulation, GAN reconstruction, baselines";

  py::register_exception<ConfigError>(m, "HoloConfigError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<ParamError>(m, "HoloParamError", PyExc_ValueError);

  m.def(
      "propagate",
      [](const ComplexArray& field, double wavelength_um, double pixel_um, double z_um) {
        const ComplexField f = field_from_numpy(field);
        const auto cfg = optics_for(wavelength_um, pixel_um, z_um, f.height, f.width);
        return field_to_numpy(optics::propagate(f, cfg, z_um));
      },
      py::arg("field"), py::arg("wavelength_um"), py::arg("pixel_um"), py::arg("z_um"),
      "Angular-spectrum propagation of a complex field over z_um.");

  m.def(
      "synthesize_target",
      [](const std::string& pattern, int height, int width, double phase_rad,
         double attenuation, double disc_radius, std::uint64_t seed) {
        optics::TargetSpec spec;
        spec.kind = optics::target_kind_from_name(pattern);
        spec.height = height;
        spec.width = width;
        spec.phase_rad = phase_rad;
        spec.attenuation = attenuation;
        spec.disc_radius = disc_radius;
        spec.seed = seed;
        const auto t = optics::synthesize_target(spec);
        py::dict out;
        out["attenuation"] = to_numpy(t.attenuation, t.height, t.width);
        out["phase_shift"] = to_numpy(t.phase_shift, t.height, t.width);
        std::vector<double> mask(t.truth_mask.begin(), t.truth_mask.end());
        out["truth_mask"] = to_numpy(mask, t.height, t.width);
        return out;
      },
      py::arg("pattern"), py::arg("height") = 256, py::arg("width") = 256,
      py::arg("phase_rad") = 1.5707963267948966, py::arg("attenuation") = 1.0,
      py::arg("disc_radius") = 32.0, py::arg("seed") = 0,
      "Builds a synthetic transmittance target (usaf|disc|text|cell|dendrite).");

  m.def(
      "form_hologram",
      [](const RealArray& attenuation, const RealArray& phase_shift,
         double wavelength_um, double pixel_um, double z_um) {
        ObjectTransmittance t;
        t.height = int(attenuation.shape(0));
        t.width = int(attenuation.shape(1));
        t.attenuation.assign(attenuation.data(), attenuation.data() + attenuation.size());
        t.phase_shift.assign(phase_shift.data(), phase_shift.data() + phase_shift.size());
        t.truth_mask.assign(t.attenuation.size(), 0);
        const auto cfg =
            optics_for(wavelength_um, pixel_um, z_um, t.height, t.width);
        const Hologram h = optics::form_hologram(t, cfg);
        return to_numpy(h.values, h.height, h.width);
      },
      py::arg("attenuation"), py::arg("phase_shift"), py::arg("wavelength_um") = 0.532,
      py::arg("pixel_um") = 2.0, py::arg("z_um") = 5500.0,
      "Mean-normalized in-line hologram of a transmittance target.");

  m.def(
      "add_noise",
      [](const RealArray& hologram, double sigma, std::uint64_t seed) {
        const Hologram h = hologram_from_numpy(hologram, false);
        const Hologram noisy = optics::add_noise(h, sigma, seed);
        return to_numpy(noisy.values, noisy.height, noisy.width);
      },
      py::arg("hologram"), py::arg("sigma"), py::arg("seed") = 0,
      "Additive Gaussian noise on the 0-255 scale with clamping.");

  m.def(
      "back_propagate",
      [](const RealArray& hologram, double wavelength_um, double pixel_um, double z_um,
         bool sqrt_input) {
        const Hologram h = hologram_from_numpy(hologram, true);
        const auto cfg = optics_for(wavelength_um, pixel_um, z_um, h.height, h.width);
        return field_to_numpy(optics::back_propagate(h, cfg, sqrt_input));
      },
      py::arg("hologram"), py::arg("wavelength_um") = 0.532, py::arg("pixel_um") = 2.0,
      py::arg("z_um") = 5500.0, py::arg("sqrt_input") = false);

  m.def(
      "reconstruct",
      [](const RealArray& hologram, double wavelength_um, double pixel_um, double z_um,
         const py::dict& train) {
        const Hologram h = hologram_from_numpy(hologram, true);
        const auto cfg = optics_for(wavelength_um, pixel_um, z_um, h.height, h.width);
        const auto tc = train_config_from_kwargs(train);
        trainer::ReconstructionResult res;
        {
          py::gil_scoped_release release;
          res = trainer::reconstruct(h, cfg, tc);
        }
        py::dict out;
        out["object_wave"] = field_to_numpy(res.object_wave);
        out["amplitude"] = to_numpy(res.amplitude, res.height, res.width);
        out["phase"] = to_numpy(res.phase, res.height, res.width);
        std::vector<double> mask(res.final_mask.values.begin(),
                                 res.final_mask.values.end());
        out["mask"] = to_numpy(mask, res.height, res.width);
        py::list history;
        for (const auto& rec : res.history) {
          py::dict r;
          r["interval"] = rec.interval;
          r["loss_g"] = rec.loss_g;
          r["loss_d"] = rec.loss_d;
          r["loss_auto"] = rec.loss_auto;
          r["loss_b"] = rec.loss_b;
          r["temperature"] = rec.temperature;
          if (rec.mask_accepted.has_value())
            r["mask_accepted"] = *rec.mask_accepted;
          else
            r["mask_accepted"] = py::none();
          history.append(std::move(r));
        }
        out["history"] = std::move(history);
        return out;
      },
      py::arg("hologram"), py::arg("wavelength_um") = 0.532, py::arg("pixel_um") = 2.0,
      py::arg("z_um") = 5500.0, py::arg("train") = py::dict(),
      "One-shot GAN reconstruction of the object wave from a hologram.");

  m.def(
      "backprop_only",
      [](const RealArray& hologram, double wavelength_um, double pixel_um, double z_um,
         bool sqrt_input) {
        const Hologram h = hologram_from_numpy(hologram, true);
        const auto cfg = optics_for(wavelength_um, pixel_um, z_um, h.height, h.width);
        return field_to_numpy(baselines::backprop_only(h, cfg, sqrt_input));
      },
      py::arg("hologram"), py::arg("wavelength_um") = 0.532, py::arg("pixel_um") = 2.0,
      py::arg("z_um") = 5500.0, py::arg("sqrt_input") = false);

  m.def(
      "gerchberg_saxton",
      [](const RealArray& hologram, double wavelength_um, double pixel_um, double z_um,
         int iters) {
        const Hologram h = hologram_from_numpy(hologram, true);
        const auto cfg = optics_for(wavelength_um, pixel_um, z_um, h.height, h.width);
        baselines::GsResult gs;
        {
          py::gil_scoped_release release;
          gs = baselines::gerchberg_saxton(h, cfg, iters);
        }
        return py::make_tuple(field_to_numpy(gs.object_field), gs.residual_history);
      },
      py::arg("hologram"), py::arg("wavelength_um") = 0.532, py::arg("pixel_um") = 2.0,
      py::arg("z_um") = 5500.0, py::arg("iters") = 100,
      "Error-reduction baseline; returns (object_field, residual_history).");

  m.def(
      "psnr",
      [](const RealArray& a, const RealArray& b) {
        std::vector<double> va(a.data(), a.data() + a.size());
        std::vector<double> vb(b.data(), b.data() + b.size());
        return evalx::psnr(va, vb, int(a.shape(0)), int(a.shape(1)));
      },
      py::arg("a"), py::arg("b"), "PSNR in dB for images in [0, 1] (99 dB cap).");

  m.def(
      "ssim",
      [](const RealArray& a, const RealArray& b) {
        std::vector<double> va(a.data(), a.data() + a.size());
        std::vector<double> vb(b.data(), b.data() + b.size());
        return evalx::ssim(va, vb, int(a.shape(0)), int(a.shape(1)));
      },
      py::arg("a"), py::arg("b"), "Mean SSIM (11x11 Gaussian window, range 1).");
}
