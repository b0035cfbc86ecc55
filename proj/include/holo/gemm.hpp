#pragma once

namespace holo {

// Row-major C = alpha * op(A) * op(B) + beta * C, backed by OpenBLAS.
//
// The library is loaded lazily at first use (see gemm.cpp): OpenBLAS picks
// its kernels from OPENBLAS_CORETYPE at load time, and on some virtualized
// hosts the auto-detection falls back to pre-AVX kernels that are several
// times slower. Loading after setting the environment keeps that fixable.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha,
          const float* a, int lda, const float* b, int ldb, float beta, float* c,
          int ldc);

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha,
          const double* a, int lda, const double* b, int ldb, double beta, double* c,
          int ldc);

}  // namespace holo
