#include "qtraj/kernels.hpp"

#if defined(QTRAJ_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>

namespace qtraj::kernels {
namespace {

// One __m256d holds two interleaved complex doubles [re0 im0 re1 im1].
// alpha * x for both lanes: with ar/ai broadcast,
//   fmaddsub(ar, x, ai * swap(x)) = [ar*xr - ai*xi, ar*xi + ai*xr, ...]
inline __m256d cmul2(__m256d ar, __m256d ai, __m256d x) {
  const __m256d xs = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xs));
}

void v_axpy(cplx alpha, const cplx* x, cplx* y, int len) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  int i = 0;
  for (; i + 2 <= len; i += 2) {
    const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    __m256d yv = _mm256_loadu_pd(reinterpret_cast<double*>(y + i));
    yv = _mm256_add_pd(yv, cmul2(ar, ai, xv));
    _mm256_storeu_pd(reinterpret_cast<double*>(y + i), yv);
  }
  for (; i < len; ++i) y[i] += alpha * x[i];
}

void v_scale(cplx alpha, cplx* x, int len) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  int i = 0;
  for (; i + 2 <= len; i += 2) {
    const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(x + i), cmul2(ar, ai, xv));
  }
  for (; i < len; ++i) x[i] *= alpha;
}

cplx v_dotc(const cplx* x, const cplx* y, int len) {
  // re parts: even+odd lanes of x*y; im parts: odd-even lanes of swap(x)*y.
  __m256d accr = _mm256_setzero_pd();
  __m256d acci = _mm256_setzero_pd();
  int i = 0;
  for (; i + 2 <= len; i += 2) {
    const __m256d xv = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    const __m256d yv = _mm256_loadu_pd(reinterpret_cast<const double*>(y + i));
    accr = _mm256_fmadd_pd(xv, yv, accr);
    acci = _mm256_fmadd_pd(_mm256_permute_pd(xv, 0x5), yv, acci);
  }
  alignas(32) double r[4], s[4];
  _mm256_store_pd(r, accr);
  _mm256_store_pd(s, acci);
  double re = (r[0] + r[1]) + (r[2] + r[3]);
  double im = (s[1] - s[0]) + (s[3] - s[2]);
  for (; i < len; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

void v_matmul_acc(const cplx* a, const cplx* b, cplx* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    cplx* crow = c + static_cast<size_t>(i) * n;
    const cplx* arow = a + static_cast<size_t>(i) * k;
    for (int kk = 0; kk < k; ++kk) {
      const cplx aik = arow[kk];
      if (aik.real() == 0.0 && aik.imag() == 0.0) continue;
      const cplx* brow = b + static_cast<size_t>(kk) * n;
      const __m256d ar = _mm256_set1_pd(aik.real());
      const __m256d ai = _mm256_set1_pd(aik.imag());
      int j = 0;
      for (; j + 2 <= n; j += 2) {
        __m256d cv = _mm256_loadu_pd(reinterpret_cast<double*>(crow + j));
        const __m256d bv = _mm256_loadu_pd(reinterpret_cast<const double*>(brow + j));
        cv = _mm256_add_pd(cv, cmul2(ar, ai, bv));
        _mm256_storeu_pd(reinterpret_cast<double*>(crow + j), cv);
      }
      for (; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void v_matmul(const cplx* a, const cplx* b, cplx* c, int m, int k, int n) {
  std::fill(c, c + static_cast<size_t>(m) * n, cplx{});
  v_matmul_acc(a, b, c, m, k, n);
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops{"avx2", v_matmul, v_matmul_acc, v_axpy, v_scale, v_dotc};
  return ops;
}

bool avx2_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace qtraj::kernels

#endif  // QTRAJ_HAVE_AVX2
