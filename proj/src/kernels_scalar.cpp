#include "qtraj/kernels.hpp"

#include <algorithm>

namespace qtraj::kernels {
namespace {

void s_axpy(cplx alpha, const cplx* x, cplx* y, int len) {
  for (int i = 0; i < len; ++i) y[i] += alpha * x[i];
}

void s_scale(cplx alpha, cplx* x, int len) {
  for (int i = 0; i < len; ++i) x[i] *= alpha;
}

cplx s_dotc(const cplx* x, const cplx* y, int len) {
  double re = 0.0, im = 0.0;
  for (int i = 0; i < len; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
  return {re, im};
}

// Row-axpy formulation: c[i,:] accumulates a(i,kk) * b[kk,:] with kk
// innermost-outer, matching the vectorized variant's summation order.
void s_matmul_acc(const cplx* a, const cplx* b, cplx* c, int m, int k, int n) {
  for (int i = 0; i < m; ++i) {
    cplx* crow = c + static_cast<size_t>(i) * n;
    const cplx* arow = a + static_cast<size_t>(i) * k;
    for (int kk = 0; kk < k; ++kk) {
      const cplx aik = arow[kk];
      if (aik.real() == 0.0 && aik.imag() == 0.0) continue;
      const cplx* brow = b + static_cast<size_t>(kk) * n;
      for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void s_matmul(const cplx* a, const cplx* b, cplx* c, int m, int k, int n) {
  std::fill(c, c + static_cast<size_t>(m) * n, cplx{});
  s_matmul_acc(a, b, c, m, k, n);
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{"scalar", s_matmul, s_matmul_acc, s_axpy, s_scale, s_dotc};
  return ops;
}

}  // namespace qtraj::kernels
