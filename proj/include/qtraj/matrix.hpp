#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

#include "qtraj/errors.hpp"
#include "qtraj/kernels.hpp"

namespace qtraj {

using cplx = std::complex<double>;

// Dense row-major complex matrix.  Small and value-semantic; the simulation
// steppers keep preallocated instances and use the *_into entry points so the
// inner loops never allocate.
class CMat {
public:
  CMat() = default;
  CMat(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

  static CMat identity(int n);
  static CMat diag(const std::vector<cplx>& d);
  static CMat diag_real(const std::vector<double>& d);
  static CMat from_rows(std::initializer_list<std::initializer_list<cplx>> rows);
  // Rank-one projector |v><v| / <v|v>.
  static CMat pure(const std::vector<cplx>& ket);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return static_cast<int>(a_.size()); }
  bool is_square() const { return rows_ == cols_; }

  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }

  cplx& operator()(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
  const cplx& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

  void set_zero();
  void resize(int rows, int cols);

  CMat& operator+=(const CMat& o);
  CMat& operator-=(const CMat& o);
  CMat& operator*=(cplx s);

  CMat adjoint() const;
  cplx trace() const;
  double frob_norm() const;
  double max_abs() const;
  double herm_defect() const;  // max |A - A^dagger| entry, squares only

  // out = a*b / out += a*b; out must not alias a or b.
  static void mul_into(const CMat& a, const CMat& b, CMat& out);
  static void mul_acc(const CMat& a, const CMat& b, CMat& out);

  friend CMat operator*(const CMat& a, const CMat& b);
  friend CMat operator+(CMat a, const CMat& b) { return a += b; }
  friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
  friend CMat operator*(cplx s, CMat a) { return a *= s; }

private:
  int rows_ = 0, cols_ = 0;
  std::vector<cplx> a_;
};

// y += alpha * x
void add_scaled(CMat& y, cplx alpha, const CMat& x);
double max_abs_diff(const CMat& a, const CMat& b);
// Tr[a * b] without forming the product.
cplx trace_prod(const CMat& a, const CMat& b);
// Tr[rho * x] for Hermitian x; imaginary part is discarded.
double real_expectation(const CMat& rho, const CMat& x);

CMat pauli_x();
CMat pauli_y();
CMat pauli_z();

// Kronecker product, left factor major: entry ((r*p+v),(s*q+w)) = a(r,s)*b(v,w)
// for b of shape p x q.
CMat tensor(const CMat& a, const CMat& b);

// For k acting on C^d tensor C^m, the d x d operator block(k,i,j)(r,s) =
// k(r*m+i, s*m+j), i.e. the <i|.|j> environment matrix element.
CMat block(const CMat& k, int i, int j, int d, int m);

// Trace out the second (m-dimensional) factor: sum of the diagonal blocks.
CMat partial_trace_env(const CMat& k, int d, int m);

// Eigendecomposition of a Hermitian matrix, h = V diag(w) V^dagger with
// eigenvalues ascending and V's columns the eigenvectors.  Cyclic complex
// Jacobi; plenty for the small dimensions used here.
struct EighResult {
  std::vector<double> values;
  CMat vectors;
};
EighResult eigh(const CMat& h);

// Scratch for the allocation-free variants below.
struct EighWork {
  CMat a, v;
  std::vector<double> w;
  std::vector<int> order;
};
void eigh_into(const CMat& h, EighWork& wk);

// exp(-i t h) for Hermitian h (checked to 1e-10).
CMat expm_hermitian(const CMat& h, double t);

struct StateCheck {
  double herm_defect = 0.0;
  double trace_defect = 0.0;
  double min_eig = 0.0;
  bool ok(double tol = 1e-10) const {
    return herm_defect <= tol && trace_defect <= tol && min_eig >= -tol;
  }
};
StateCheck check_state(const CMat& m);

// Density matrix with validated invariants (Hermitian, unit trace, positive
// semidefinite, all to 1e-10).  unchecked() skips validation for states that
// are valid by construction.
class DensityMatrix {
public:
  explicit DensityMatrix(CMat m);
  static DensityMatrix unchecked(CMat m);

  int dim() const { return mat_.rows(); }
  const CMat& mat() const { return mat_; }

private:
  DensityMatrix() = default;
  CMat mat_;
};

// Nearest-state repair: hermitize, clip negative eigenvalues, renormalize the
// trace.  Returns the max-entry distance moved.  Throws NumericalError when
// the positive part has trace <= 1e-12.
double project_state_inplace(CMat& m, EighWork& wk);
DensityMatrix project_to_state(const CMat& m);

}  // namespace qtraj
