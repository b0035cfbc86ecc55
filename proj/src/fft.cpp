#include "holo/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace holo::fft {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// Plans are created once per shape with FFTW_ESTIMATE (deterministic and
// cheap to plan) and executed through the new-array interface. FFTW_UNALIGNED
// keeps execution valid for arbitrary caller buffers.
PlanPair& plans_for(int h, int w) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto& entry = cache[{h, w}];
  if (!entry.fwd) {
    fftw_complex* tmp = fftw_alloc_complex(size_t(h) * w);
    entry.fwd = fftw_plan_dft_2d(h, w, tmp, tmp, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    entry.bwd = fftw_plan_dft_2d(h, w, tmp, tmp, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(tmp);
  }
  return entry;
}

}  // namespace

void forward(std::complex<double>* data, int h, int w) {
  auto& p = plans_for(h, w);
  fftw_execute_dft(p.fwd, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

void inverse(std::complex<double>* data, int h, int w) {
  auto& p = plans_for(h, w);
  fftw_execute_dft(p.bwd, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
  const double scale = 1.0 / (double(h) * double(w));
  const size_t n = size_t(h) * w;
  for (size_t i = 0; i < n; ++i) data[i] *= scale;
}

}  // namespace holo::fft
