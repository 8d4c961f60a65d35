#pragma once

#include <complex>
#include <string_view>

namespace qtraj::kernels {

using cplx = std::complex<double>;

// Low-level dense complex kernels behind everything hot in the library.
// Two implementations ship: a scalar reference and an AVX2/FMA variant.
// The active one is picked at load time (or forced via select / the
// QTRAJ_KERNELS environment variable, values "scalar", "avx2", "auto").
//
// All matrices are row-major contiguous interleaved complex doubles.
// Output buffers must not alias inputs for the matmul entry points.
// Both implementations accumulate each output element over the inner index
// in the same order, so results agree to rounding (FMA contraction only),
// not bitwise.
struct Ops {
  const char* name;
  // c (m x n) = a (m x k) * b (k x n)
  void (*matmul)(const cplx* a, const cplx* b, cplx* c, int m, int k, int n);
  // c += a * b
  void (*matmul_acc)(const cplx* a, const cplx* b, cplx* c, int m, int k, int n);
  // y += alpha * x
  void (*axpy)(cplx alpha, const cplx* x, cplx* y, int len);
  // x *= alpha
  void (*scale)(cplx alpha, cplx* x, int len);
  // sum_i conj(x_i) * y_i
  cplx (*dotc)(const cplx* x, const cplx* y, int len);
};

const Ops& scalar_ops();
#if defined(QTRAJ_HAVE_AVX2)
const Ops& avx2_ops();
bool avx2_supported();
#endif

// Currently active implementation.
const Ops& active();

// Force an implementation; returns false (and leaves the selection alone)
// if the name is unknown or unsupported on this CPU.
bool select(std::string_view name);

inline void matmul(const cplx* a, const cplx* b, cplx* c, int m, int k, int n) {
  active().matmul(a, b, c, m, k, n);
}
inline void matmul_acc(const cplx* a, const cplx* b, cplx* c, int m, int k, int n) {
  active().matmul_acc(a, b, c, m, k, n);
}
inline void axpy(cplx alpha, const cplx* x, cplx* y, int len) {
  active().axpy(alpha, x, y, len);
}
inline void scale(cplx alpha, cplx* x, int len) { active().scale(alpha, x, len); }
inline cplx dotc(const cplx* x, const cplx* y, int len) { return active().dotc(x, y, len); }

}  // namespace qtraj::kernels
