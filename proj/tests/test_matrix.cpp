#include <doctest.h>

#include <random>

#include "qtraj/matrix.hpp"
#include "oracles.hpp"

using namespace qtraj;

TEST_SUITE("matrix") {

TEST_CASE("tensor product against the quadruple loop") {
  std::mt19937_64 rng(21);
  CHECK(max_abs_diff(tensor(CMat::identity(2), CMat::identity(2)),
                     CMat::identity(4)) == 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const CMat a = oracle::random_matrix(rng, 2, 2);
    const CMat b = oracle::random_matrix(rng, 3, 3);
    CHECK(max_abs_diff(tensor(a, b), oracle::naive_kron(a, b)) < 1e-14);
    // Mixed products factorize: (a (x) b)(c (x) d) = ac (x) bd.
    const CMat c = oracle::random_matrix(rng, 2, 2);
    const CMat d = oracle::random_matrix(rng, 3, 3);
    CHECK(max_abs_diff(tensor(a, b) * tensor(c, d),
                       tensor(a * c, b * d)) < 1e-11);
  }
}

TEST_CASE("tensor ordering puts the system factor first") {
  // a (x) b entry ((r p + v),(s q + w)) = a(r,s) b(v,w) with b of shape p x q.
  const CMat a = CMat::from_rows({{2, 0}, {0, 3}});
  const CMat b = CMat::from_rows({{5, 7}, {11, 13}});
  const CMat t = tensor(a, b);
  CHECK(t(0, 1) == cplx(2.0 * 7.0));
  CHECK(t(2, 3) == cplx(3.0 * 7.0));
  CHECK(t(3, 2) == cplx(3.0 * 11.0));
  CHECK(t(0, 2) == cplx(0.0));
}

TEST_CASE("block extraction inverts the tensor product") {
  std::mt19937_64 rng(22);
  const int d = 2, m = 3;
  const CMat a = oracle::random_matrix(rng, d, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      CMat e(m, m);
      e(i, j) = 1.0;
      const CMat k = tensor(a, e);
      for (int bi = 0; bi < m; ++bi)
        for (int bj = 0; bj < m; ++bj) {
          const CMat got = block(k, bi, bj, d, m);
          if (bi == i && bj == j)
            CHECK(max_abs_diff(got, a) == 0.0);
          else
            CHECK(got.max_abs() == 0.0);
        }
    }
  CHECK_THROWS_AS(block(a, 0, 0, 2, 3), ValidationError);
  CHECK_THROWS_AS(block(tensor(a, CMat::identity(3)), 0, 3, 2, 3), ValidationError);
}

TEST_CASE("partial trace over the environment") {
  std::mt19937_64 rng(23);
  const int d = 2, m = 3;
  // Product states: Tr_env[a (x) b] = Tr[b] a.
  const CMat a = oracle::random_matrix(rng, d, d);
  const CMat b = oracle::random_matrix(rng, m, m);
  CMat want = a;
  want *= b.trace();
  CHECK(max_abs_diff(partial_trace_env(tensor(a, b), d, m), want) < 1e-13);
  // Identity: Tr_env[I_dm] = m I_d.
  CMat mid = CMat::identity(d);
  mid *= static_cast<double>(m);
  CHECK(max_abs_diff(partial_trace_env(CMat::identity(d * m), d, m), mid) == 0.0);
  // Duality: Tr[ptrace(K) B] = Tr[K (B (x) I)].
  const CMat k = oracle::random_matrix(rng, d * m, d * m);
  const CMat bb = oracle::random_matrix(rng, d, d);
  const cplx lhs = trace_prod(partial_trace_env(k, d, m), bb);
  const cplx rhs = trace_prod(k, tensor(bb, CMat::identity(m)));
  CHECK(std::abs(lhs - rhs) < 1e-11);
  CHECK_THROWS_AS(partial_trace_env(oracle::random_matrix(rng, 5, 5), 2, 3),
                  ValidationError);
}

TEST_CASE("eigh reconstructs and is orthonormal") {
  std::mt19937_64 rng(24);
  for (int n : {1, 2, 3, 4, 6, 8}) {
    const CMat h = oracle::random_hermitian(rng, n);
    const EighResult e = eigh(h);
    // V diag(w) V^dagger = h
    CMat rec(n, n);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) {
        cplx acc = 0.0;
        for (int k = 0; k < n; ++k)
          acc += e.vectors(r, k) * e.values[k] * std::conj(e.vectors(s, k));
        rec(r, s) = acc;
      }
    CHECK(max_abs_diff(rec, h) < 1e-12 * std::max(1.0, h.max_abs()));
    CHECK(max_abs_diff(e.vectors * e.vectors.adjoint(), CMat::identity(n)) < 1e-13);
    for (int k = 1; k < n; ++k) CHECK(e.values[k] >= e.values[k - 1]);
  }
}

TEST_CASE("expm_hermitian against Taylor series") {
  std::mt19937_64 rng(25);
  CHECK(max_abs_diff(expm_hermitian(CMat(3, 3), 1.0), CMat::identity(3)) == 0.0);

  const CMat d = CMat::diag_real({1.0, -2.0, 0.5});
  const CMat ed = expm_hermitian(d, 2.0);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(ed(i, i) - std::polar(1.0, -2.0 * d(i, i).real())) < 1e-14);

  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 3;
    const CMat h = oracle::random_hermitian(rng, n);
    for (double t : {0.1, 1.0, -0.7}) {
      const CMat u = expm_hermitian(h, t);
      CHECK(max_abs_diff(u, oracle::taylor_expm(h, t)) < 1e-12);
      CHECK(max_abs_diff(u * u.adjoint(), CMat::identity(n)) < 1e-12);
    }
  }
  // Large argument: unitarity must survive big eigenvalue spreads.
  CMat big = oracle::random_hermitian(rng, 4);
  big *= 150.0;
  const CMat u = expm_hermitian(big, 1.0 / 1024.0);
  CHECK(max_abs_diff(u * u.adjoint(), CMat::identity(4)) < 1e-12);

  CHECK_THROWS_AS(expm_hermitian(oracle::random_matrix(rng, 3, 3), 1.0),
                  ValidationError);
}

TEST_CASE("project_to_state fixes valid states and clips invalid ones") {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    const CMat rho = oracle::random_state(rng, 3);
    const DensityMatrix p = project_to_state(rho);
    CHECK(max_abs_diff(p.mat(), rho) < 1e-12);
  }

  // diag(1.1, -0.1) clips to diag(1, 0).
  const DensityMatrix p = project_to_state(CMat::diag_real({1.1, -0.1}));
  CHECK(std::abs(p.mat()(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(p.mat()(1, 1)) < 1e-14);

  // 2x2 closed form: for Hermitian m with eigenvalues a > 0 > b the repaired
  // state is the projector onto the positive eigenvector.
  for (int trial = 0; trial < 20; ++trial) {
    CMat m = oracle::random_hermitian(rng, 2);
    const double tr = m.trace().real();
    const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    const double disc = std::sqrt(tr * tr / 4.0 - det);
    const double hi = tr / 2.0 + disc, lo = tr / 2.0 - disc;
    if (hi <= 0.0 || lo >= 0.0) continue;
    // Eigenvector for hi: (m - lo I) applied to any column.
    cplx v0 = m(0, 0) - lo, v1 = m(1, 0);
    if (std::abs(v0) + std::abs(v1) < 1e-9) {
      v0 = m(0, 1);
      v1 = m(1, 1) - lo;
    }
    const double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
    v0 /= nrm;
    v1 /= nrm;
    const CMat want = CMat::from_rows({{v0 * std::conj(v0), v0 * std::conj(v1)},
                                       {v1 * std::conj(v0), v1 * std::conj(v1)}});
    const DensityMatrix got = project_to_state(m);
    CHECK(max_abs_diff(got.mat(), want) < 1e-10);
  }

  CHECK_THROWS_AS(project_to_state(CMat::diag_real({-1.0, -2.0})), NumericalError);
  CHECK_THROWS_AS(project_to_state(CMat(2, 2)), NumericalError);
}

TEST_CASE("density matrix validation") {
  CHECK_NOTHROW(DensityMatrix(CMat::diag_real({0.5, 0.5})));
  CHECK_NOTHROW(DensityMatrix(oracle::plus_state()));
  CHECK_THROWS_AS(DensityMatrix(CMat::diag_real({0.6, 0.6})), ValidationError);
  CHECK_THROWS_AS(DensityMatrix(CMat::diag_real({1.5, -0.5})), ValidationError);
  CHECK_THROWS_AS(DensityMatrix(CMat::from_rows({{0.5, 0.5}, {0.0, 0.5}})),
                  ValidationError);
  const StateCheck chk = check_state(CMat::diag_real({1.5, -0.5}));
  CHECK(chk.min_eig == doctest::Approx(-0.5));
  CHECK_FALSE(chk.ok());
}

TEST_CASE("trace helpers") {
  std::mt19937_64 rng(27);
  const CMat a = oracle::random_matrix(rng, 3, 3);
  const CMat b = oracle::random_matrix(rng, 3, 3);
  CHECK(std::abs(trace_prod(a, b) - (a * b).trace()) < 1e-12);
  const CMat rho = oracle::random_state(rng, 2);
  const CMat x = oracle::random_hermitian(rng, 2);
  CHECK(real_expectation(rho, x) == doctest::Approx((rho * x).trace().real()).epsilon(1e-12));
}

}  // TEST_SUITE
