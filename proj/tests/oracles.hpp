#pragma once

// Reference implementations used to check the library from the outside.
// Everything here is written independently of the production code paths:
// plain loops, Taylor series, and the standard library RNG.

#include <complex>
#include <random>
#include <vector>

#include "qtraj/matrix.hpp"
#include "qtraj/model.hpp"

namespace oracle {

using qtraj::CMat;
using qtraj::cplx;

inline CMat naive_matmul(const CMat& a, const CMat& b) {
  CMat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

inline CMat naive_kron(const CMat& a, const CMat& b) {
  CMat c(a.rows() * b.rows(), a.cols() * b.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int s = 0; s < a.cols(); ++s)
      for (int v = 0; v < b.rows(); ++v)
        for (int w = 0; w < b.cols(); ++w)
          c(r * b.rows() + v, s * b.cols() + w) = a(r, s) * b(v, w);
  return c;
}

// exp(-i t h) by scaled Taylor summation.
inline CMat taylor_expm(const CMat& h, double t) {
  const int n = h.rows();
  CMat a = h;
  a *= cplx(0.0, -t);
  int squarings = 0;
  while (a.max_abs() * n > 0.25) {
    a *= 0.5;
    ++squarings;
  }
  CMat result = CMat::identity(n);
  CMat term = CMat::identity(n);
  for (int k = 1; k <= 30; ++k) {
    term = naive_matmul(term, a);
    term *= 1.0 / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = naive_matmul(result, result);
  return result;
}

inline CMat random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  CMat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = cplx(g(rng), g(rng));
  return m;
}

inline CMat random_hermitian(std::mt19937_64& rng, int n) {
  const CMat a = random_matrix(rng, n, n);
  CMat h(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) h(r, c) = 0.5 * (a(r, c) + std::conj(a(c, r)));
  return h;
}

inline CMat random_state(std::mt19937_64& rng, int n) {
  const CMat a = random_matrix(rng, n, n);
  CMat rho = naive_matmul(a, a.adjoint());
  rho *= 1.0 / rho.trace().real();
  return rho;
}

// Random rank-r projector from Gram-Schmidt over Gaussian vectors.
inline CMat random_projector(std::mt19937_64& rng, int n, int rank) {
  std::normal_distribution<double> g;
  std::vector<std::vector<cplx>> basis;
  while (static_cast<int>(basis.size()) < rank) {
    std::vector<cplx> v(n);
    for (auto& z : v) z = cplx(g(rng), g(rng));
    for (const auto& u : basis) {
      cplx proj = 0.0;
      for (int i = 0; i < n; ++i) proj += std::conj(u[i]) * v[i];
      for (int i = 0; i < n; ++i) v[i] -= proj * u[i];
    }
    double nrm = 0.0;
    for (const auto& z : v) nrm += std::norm(z);
    if (nrm < 1e-6) continue;
    nrm = std::sqrt(nrm);
    for (auto& z : v) z /= nrm;
    basis.push_back(std::move(v));
  }
  CMat p(n, n);
  for (const auto& u : basis)
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) p(r, c) += u[r] * std::conj(u[c]);
  return p;
}

// Spin lowering coupling on a qubit with a single excited bath level.
inline qtraj::InteractionModel qubit_model(double beta) {
  qtraj::InteractionModel m;
  m.dim = 2;
  m.levels = 1;
  m.h0 = qtraj::pauli_z();
  m.couplings.push_back(CMat::from_rows({{0, 1}, {0, 0}}));
  m.gammas = {1.0};
  m.beta = beta;
  return m;
}

inline CMat plus_state() {
  return CMat::from_rows({{0.5, 0.5}, {0.5, 0.5}});
}

}  // namespace oracle
