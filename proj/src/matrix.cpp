#include "qtraj/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qtraj {

CMat CMat::identity(int n) {
  CMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::diag(const std::vector<cplx>& d) {
  const int n = static_cast<int>(d.size());
  CMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = d[i];
  return m;
}

CMat CMat::diag_real(const std::vector<double>& d) {
  const int n = static_cast<int>(d.size());
  CMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = d[i];
  return m;
}

CMat CMat::from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r ? static_cast<int>(rows.begin()->size()) : 0;
  CMat m(r, c);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c)
      throw ValidationError("from_rows: ragged row lengths");
    int j = 0;
    for (const cplx& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

CMat CMat::pure(const std::vector<cplx>& ket) {
  const int n = static_cast<int>(ket.size());
  double nrm2 = 0.0;
  for (const cplx& v : ket) nrm2 += std::norm(v);
  if (nrm2 <= 0.0) throw ValidationError("pure: zero ket");
  CMat m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = ket[r] * std::conj(ket[c]) / nrm2;
  return m;
}

void CMat::set_zero() { std::fill(a_.begin(), a_.end(), cplx{}); }

void CMat::resize(int rows, int cols) {
  rows_ = rows;
  cols_ = cols;
  a_.assign(static_cast<size_t>(rows) * cols, cplx{});
}

CMat& CMat::operator+=(const CMat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw ValidationError("matrix add: shape mismatch");
  kernels::axpy(1.0, o.data(), data(), size());
  return *this;
}

CMat& CMat::operator-=(const CMat& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw ValidationError("matrix sub: shape mismatch");
  kernels::axpy(-1.0, o.data(), data(), size());
  return *this;
}

CMat& CMat::operator*=(cplx s) {
  kernels::scale(s, data(), size());
  return *this;
}

CMat CMat::adjoint() const {
  CMat m(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
  return m;
}

cplx CMat::trace() const {
  if (!is_square()) throw ValidationError("trace: non-square matrix");
  cplx t = 0.0;
  for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double CMat::frob_norm() const {
  double s = 0.0;
  for (const cplx& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

double CMat::max_abs() const {
  double s = 0.0;
  for (const cplx& v : a_) s = std::max(s, std::abs(v));
  return s;
}

double CMat::herm_defect() const {
  if (!is_square()) throw ValidationError("herm_defect: non-square matrix");
  double s = 0.0;
  for (int r = 0; r < rows_; ++r)
    for (int c = r; c < cols_; ++c)
      s = std::max(s, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return s;
}

void CMat::mul_into(const CMat& a, const CMat& b, CMat& out) {
  if (a.cols_ != b.rows_) throw ValidationError("matmul: inner dimension mismatch");
  if (out.rows_ != a.rows_ || out.cols_ != b.cols_) out.resize(a.rows_, b.cols_);
  kernels::matmul(a.data(), b.data(), out.data(), a.rows_, a.cols_, b.cols_);
}

void CMat::mul_acc(const CMat& a, const CMat& b, CMat& out) {
  if (a.cols_ != b.rows_) throw ValidationError("matmul: inner dimension mismatch");
  if (out.rows_ != a.rows_ || out.cols_ != b.cols_)
    throw ValidationError("matmul acc: output shape mismatch");
  kernels::matmul_acc(a.data(), b.data(), out.data(), a.rows_, a.cols_, b.cols_);
}

CMat operator*(const CMat& a, const CMat& b) {
  CMat out(a.rows_, b.cols_);
  CMat::mul_into(a, b, out);
  return out;
}

void add_scaled(CMat& y, cplx alpha, const CMat& x) {
  if (y.rows() != x.rows() || y.cols() != x.cols())
    throw ValidationError("add_scaled: shape mismatch");
  kernels::axpy(alpha, x.data(), y.data(), y.size());
}

double max_abs_diff(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("max_abs_diff: shape mismatch");
  double s = 0.0;
  const cplx* pa = a.data();
  const cplx* pb = b.data();
  for (int i = 0; i < a.size(); ++i) s = std::max(s, std::abs(pa[i] - pb[i]));
  return s;
}

cplx trace_prod(const CMat& a, const CMat& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols())
    throw ValidationError("trace_prod: shape mismatch");
  cplx t = 0.0;
  for (int r = 0; r < a.rows(); ++r)
    for (int s = 0; s < a.cols(); ++s) t += a(r, s) * b(s, r);
  return t;
}

double real_expectation(const CMat& rho, const CMat& x) {
  // Tr[rho x] = sum conj(x(r,s)) rho(r,s) for Hermitian x.
  return kernels::dotc(x.data(), rho.data(), rho.size()).real();
}

CMat pauli_x() { return CMat::from_rows({{0, 1}, {1, 0}}); }
CMat pauli_y() { return CMat::from_rows({{0, cplx(0, -1)}, {cplx(0, 1), 0}}); }
CMat pauli_z() { return CMat::from_rows({{1, 0}, {0, -1}}); }

CMat tensor(const CMat& a, const CMat& b) {
  const int p = b.rows(), q = b.cols();
  CMat out(a.rows() * p, a.cols() * q);
  for (int r = 0; r < a.rows(); ++r)
    for (int s = 0; s < a.cols(); ++s) {
      const cplx ars = a(r, s);
      if (ars.real() == 0.0 && ars.imag() == 0.0) continue;
      for (int v = 0; v < p; ++v)
        for (int w = 0; w < q; ++w) out(r * p + v, s * q + w) = ars * b(v, w);
    }
  return out;
}

CMat block(const CMat& k, int i, int j, int d, int m) {
  if (k.rows() != d * m || k.cols() != d * m)
    throw ValidationError("block: operator shape does not match d*m");
  if (i < 0 || i >= m || j < 0 || j >= m)
    throw ValidationError("block: environment index out of range");
  CMat out(d, d);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) out(r, s) = k(r * m + i, s * m + j);
  return out;
}

CMat partial_trace_env(const CMat& k, int d, int m) {
  if (k.rows() != d * m || k.cols() != d * m)
    throw ValidationError("partial_trace_env: operator shape does not match d*m");
  CMat out(d, d);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) {
      cplx t = 0.0;
      for (int i = 0; i < m; ++i) t += k(r * m + i, s * m + i);
      out(r, s) = t;
    }
  return out;
}

namespace {

constexpr int kMaxJacobiSweeps = 100;

// One cyclic complex Jacobi pass set; a is overwritten with the diagonal,
// v accumulates the eigenvectors.
void jacobi_hermitian(CMat& a, CMat& v) {
  const int n = a.rows();
  v = CMat::identity(n);
  if (n == 1) return;

  double scale = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) scale = std::max(scale, std::abs(a(r, c)));
  if (scale == 0.0) return;
  const double stop = 1e-15 * scale;

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= stop) return;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double m = std::abs(apq);
        if (m <= stop * 1e-2) continue;
        const cplx phase = apq / m;  // a(p,q) = m * phase
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * m);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Rotation G on the (p,q) plane: col p = (c, -s conj(phase)),
        // col q = (s, c conj(phase)); update a <- G^dagger a G, v <- v G.
        const cplx gp = -s * std::conj(phase);
        const cplx gq = c * std::conj(phase);
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const cplx arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp + gp * arq;
          a(r, q) = s * arp + gq * arq;
          a(p, r) = std::conj(a(r, p));
          a(q, r) = std::conj(a(r, q));
        }
        a(p, p) = app - t * m;
        a(q, q) = aqq + t * m;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int r = 0; r < n; ++r) {
          const cplx vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp + gp * vrq;
          v(r, q) = s * vrp + gq * vrq;
        }
      }
    }
  }
  throw NumericalError("eigh: Jacobi iteration failed to converge");
}

}  // namespace

void eigh_into(const CMat& h, EighWork& wk) {
  if (!h.is_square()) throw ValidationError("eigh: non-square matrix");
  const int n = h.rows();
  // Work on the hermitized matrix so the rotations stay exactly unitary.
  wk.a.resize(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) wk.a(r, c) = 0.5 * (h(r, c) + std::conj(h(c, r)));
  jacobi_hermitian(wk.a, wk.v);

  wk.w.resize(n);
  for (int i = 0; i < n; ++i) wk.w[i] = wk.a(i, i).real();
  wk.order.resize(n);
  std::iota(wk.order.begin(), wk.order.end(), 0);
  std::stable_sort(wk.order.begin(), wk.order.end(),
                   [&](int i, int j) { return wk.w[i] < wk.w[j]; });
}

EighResult eigh(const CMat& h) {
  EighWork wk;
  eigh_into(h, wk);
  const int n = h.rows();
  EighResult res;
  res.values.resize(n);
  res.vectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const int src = wk.order[j];
    res.values[j] = wk.w[src];
    for (int r = 0; r < n; ++r) res.vectors(r, j) = wk.v(r, src);
  }
  return res;
}

CMat expm_hermitian(const CMat& h, double t) {
  if (!h.is_square()) throw ValidationError("expm_hermitian: non-square matrix");
  if (h.herm_defect() > 1e-10)
    throw ValidationError("expm_hermitian: matrix is not Hermitian within 1e-10");
  EighWork wk;
  eigh_into(h, wk);
  const int n = h.rows();
  CMat out(n, n);
  // out = V diag(exp(-i t w)) V^dagger
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) {
      cplx acc = 0.0;
      for (int k = 0; k < n; ++k)
        acc += wk.v(r, k) * std::polar(1.0, -t * wk.w[k]) * std::conj(wk.v(s, k));
      out(r, s) = acc;
    }
  return out;
}

StateCheck check_state(const CMat& m) {
  StateCheck chk;
  if (!m.is_square()) {
    chk.herm_defect = 1.0;
    chk.trace_defect = 1.0;
    chk.min_eig = -1.0;
    return chk;
  }
  chk.herm_defect = m.herm_defect();
  chk.trace_defect = std::abs(m.trace() - 1.0);
  EighWork wk;
  eigh_into(m, wk);
  chk.min_eig = *std::min_element(wk.w.begin(), wk.w.end());
  return chk;
}

DensityMatrix::DensityMatrix(CMat m) {
  if (!m.is_square()) throw ValidationError("density matrix: non-square matrix");
  const StateCheck chk = check_state(m);
  if (chk.herm_defect > 1e-10)
    throw ValidationError("density matrix: not Hermitian (defect " +
                          std::to_string(chk.herm_defect) + ")");
  if (chk.trace_defect > 1e-10)
    throw ValidationError("density matrix: trace deviates from 1 by " +
                          std::to_string(chk.trace_defect));
  if (chk.min_eig < -1e-10)
    throw ValidationError("density matrix: negative eigenvalue " +
                          std::to_string(chk.min_eig));
  mat_ = std::move(m);
}

DensityMatrix DensityMatrix::unchecked(CMat m) {
  DensityMatrix d;
  d.mat_ = std::move(m);
  return d;
}

double project_state_inplace(CMat& m, EighWork& wk) {
  if (!m.is_square()) throw ValidationError("project_to_state: non-square matrix");
  const int n = m.rows();
  eigh_into(m, wk);
  double pos_trace = 0.0;
  for (int i = 0; i < n; ++i) {
    if (wk.w[i] < 0.0) wk.w[i] = 0.0;
    pos_trace += wk.w[i];
  }
  if (pos_trace <= 1e-12)
    throw NumericalError("project_to_state: positive part has vanishing trace");

  double moved = 0.0;
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) {
      cplx acc = 0.0;
      for (int k = 0; k < n; ++k)
        acc += wk.v(r, k) * (wk.w[k] / pos_trace) * std::conj(wk.v(s, k));
      moved = std::max(moved, std::abs(acc - m(r, s)));
      m(r, s) = acc;
    }
  return moved;
}

DensityMatrix project_to_state(const CMat& m) {
  CMat out = m;
  EighWork wk;
  project_state_inplace(out, wk);
  return DensityMatrix::unchecked(std::move(out));
}

}  // namespace qtraj
