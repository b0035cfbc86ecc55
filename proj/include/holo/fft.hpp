#pragma once

#include <complex>

namespace holo {

/// 2D complex FFT on interleaved std::complex<double> buffers, backed by
/// cached FFTW plans. Convention: unnormalized forward, 1/(h*w) inverse,
/// frequencies in standard FFT layout. Thread-safe.
namespace fft {

/// In-place forward transform of an h x w row-major array.
void forward(std::complex<double>* data, int h, int w);

/// In-place inverse transform, scaled by 1/(h*w).
void inverse(std::complex<double>* data, int h, int w);

}  // namespace fft
}  // namespace holo
