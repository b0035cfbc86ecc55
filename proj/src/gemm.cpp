#include "holo/gemm.hpp"

#include <dlfcn.h>

#include <cstdlib>
#include <mutex>
#include <stdexcept>

namespace holo {
namespace {

enum CblasOrder { kRowMajor = 101 };
enum CblasTranspose { kNoTrans = 111, kTrans = 112 };

using SgemmFn = void (*)(int, int, int, int, int, int, float, const float*, int,
                         const float*, int, float, float*, int);
using DgemmFn = void (*)(int, int, int, int, int, int, double, const double*, int,
                         const double*, int, double, double*, int);

struct Blas {
  SgemmFn sgemm = nullptr;
  DgemmFn dgemm = nullptr;
};

Blas load_blas() {
  // The core-type probe of some OpenBLAS builds does not know this CPU and
  // silently falls back to SSE-era kernels. When the CPU has AVX2 and the
  // caller did not choose, pin the Haswell kernels before the library's
  // load-time detection runs. A user-provided OPENBLAS_CORETYPE always wins.
  if (__builtin_cpu_supports("avx2")) setenv("OPENBLAS_CORETYPE", "HASWELL", 0);
  // Threading only pays off for far larger matrices than these layers make.
  setenv("OPENBLAS_NUM_THREADS", "1", 0);

  void* handle = dlopen("libopenblas.so.0", RTLD_NOW | RTLD_LOCAL);
  if (!handle) handle = dlopen("libopenblas.so", RTLD_NOW | RTLD_LOCAL);
  if (!handle) throw std::runtime_error("cannot load libopenblas");

  Blas b;
  b.sgemm = reinterpret_cast<SgemmFn>(dlsym(handle, "cblas_sgemm"));
  b.dgemm = reinterpret_cast<DgemmFn>(dlsym(handle, "cblas_dgemm"));
  if (!b.sgemm || !b.dgemm)
    throw std::runtime_error("libopenblas lacks cblas_sgemm/cblas_dgemm");
  return b;
}

const Blas& blas() {
  static const Blas b = load_blas();
  return b;
}

}  // namespace

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc) {
  blas().sgemm(kRowMajor, trans_a ? kTrans : kNoTrans, trans_b ? kTrans : kNoTrans, m,
               n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a,
          int lda, const double* b, int ldb, double beta, double* c, int ldc) {
  blas().dgemm(kRowMajor, trans_a ? kTrans : kNoTrans, trans_b ? kTrans : kNoTrans, m,
               n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

}  // namespace holo
