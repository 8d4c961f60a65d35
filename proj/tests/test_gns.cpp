#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "qtraj/gns.hpp"
#include "qtraj/discrete.hpp"
#include "qtraj/harness.hpp"
#include "oracles.hpp"

using namespace qtraj;

namespace {

InteractionModel model_with_levels(int levels, double beta) {
  InteractionModel m;
  m.dim = 2;
  m.levels = levels;
  m.h0 = pauli_z();
  for (int k = 0; k < levels; ++k) {
    CMat c(2, 2);
    c(0, 1) = 1.0 / (1.0 + k);
    c(1, 0) = cplx(0.0, 0.25 * k);
    m.couplings.push_back(std::move(c));
    m.gammas.push_back(0.5 + 0.5 * k);
  }
  m.beta = beta;
  return m;
}

// Flattened representation matrix of a bath operator in the GNS basis,
// row (k,l), column (i,j).
CMat rep_matrix(const CMat& op, const GnsBasis& basis, const ThermalState& th) {
  const int m = th.dim();
  CMat r(m * m, m * m);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          r(k * m + l, i * m + j) = transport_coefficient(op, i, j, k, l, basis, th);
  return r;
}

}  // namespace

TEST_SUITE("gns") {

TEST_CASE("inner product is the weighted trace") {
  std::mt19937_64 rng(41);
  const ThermalState th = thermal_state(model_with_levels(2, 0.8));
  for (int trial = 0; trial < 10; ++trial) {
    const CMat a = oracle::random_matrix(rng, 3, 3);
    const CMat b = oracle::random_matrix(rng, 3, 3);
    const cplx direct = (th.matrix() * a.adjoint() * b).trace();
    CHECK(std::abs(gns_inner(a, b, th) - direct) < 1e-13);
    // Positivity on the diagonal.
    CHECK(gns_inner(a, a, th).real() > 0.0);
    CHECK(std::abs(gns_inner(a, a, th).imag()) < 1e-15);
  }

  InteractionModel zero = oracle::qubit_model(1.0);
  zero.beta = std::numeric_limits<double>::infinity();
  const ThermalState ground = thermal_state(zero);
  CHECK_THROWS_AS(gns_inner(CMat::identity(2), CMat::identity(2), ground),
                  ValidationError);
  CHECK_THROWS_AS(gns_inner(CMat::identity(3), CMat::identity(2), th),
                  ValidationError);
}

TEST_CASE("basis is orthonormal and starts at the identity") {
  for (int levels : {1, 2, 3}) {
    const ThermalState th = thermal_state(model_with_levels(levels, 0.7));
    const GnsBasis basis(th);
    const int m = levels + 1;
    CHECK(basis.bath_dim() == m);
    CHECK(max_abs_diff(basis.element(0, 0), CMat::identity(m)) == 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            const cplx g = gns_inner(basis.element(k, l), basis.element(i, j), th);
            const cplx want = (i == k && j == l) ? cplx(1.0) : cplx(0.0);
            CHECK(std::abs(g - want) < 1e-13);
          }
    // Diagonal elements stay diagonal, off-diagonal are scaled units.
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        CMat want(m, m);
        want(j, i) = 1.0 / std::sqrt(th.probs[i]);
        CHECK(max_abs_diff(basis.element(i, j), want) == 0.0);
      }
  }
}

TEST_CASE("one excited level has the closed form diagonal") {
  const ThermalState th = thermal_state(oracle::qubit_model(std::log(2.0)));
  const GnsBasis basis(th);
  const double b0 = th.probs[0], b1 = th.probs[1];
  const CMat want = CMat::diag_real({std::sqrt(b1 / b0), -std::sqrt(b0 / b1)});
  CHECK(max_abs_diff(basis.element(1, 1), want) < 1e-14);
}

TEST_CASE("transport of factorized operators") {
  std::mt19937_64 rng(42);
  const InteractionModel m = model_with_levels(1, 0.9);
  const ThermalState th = thermal_state(m);
  const GnsBasis basis(th);
  const int bm = 2, d = 2;

  // Identity transports to the identity on every matching index pair.
  const TransportedOperator tid =
      transport_operator(CMat::identity(d * bm), basis, th, d);
  for (int i = 0; i < bm; ++i)
    for (int j = 0; j < bm; ++j)
      for (int k = 0; k < bm; ++k)
        for (int l = 0; l < bm; ++l) {
          const CMat want = (i == k && j == l) ? CMat::identity(d) : CMat(d, d);
          CHECK(max_abs_diff(tid.at(i, j, k, l), want) < 1e-13);
        }

  // A (x) B transports to A times the scalar coefficient of B.
  const CMat a = oracle::random_matrix(rng, d, d);
  const CMat b = oracle::random_matrix(rng, bm, bm);
  const TransportedOperator tab = transport_operator(tensor(a, b), basis, th, d);
  for (int i = 0; i < bm; ++i)
    for (int j = 0; j < bm; ++j)
      for (int k = 0; k < bm; ++k)
        for (int l = 0; l < bm; ++l) {
          CMat want = a;
          want *= transport_coefficient(b, i, j, k, l, basis, th);
          CHECK(max_abs_diff(tab.at(i, j, k, l), want) < 1e-12);
        }

  CHECK_THROWS_AS(transport_operator(CMat::identity(3), basis, th, d),
                  ValidationError);
}

TEST_CASE("representation is a *-homomorphism") {
  std::mt19937_64 rng(43);
  for (int levels : {1, 2}) {
    const ThermalState th = thermal_state(model_with_levels(levels, 0.6));
    const GnsBasis basis(th);
    const int m = levels + 1;
    CHECK(max_abs_diff(rep_matrix(CMat::identity(m), basis, th),
                       CMat::identity(m * m)) < 1e-13);
    for (int trial = 0; trial < 3; ++trial) {
      const CMat a = oracle::random_matrix(rng, m, m);
      const CMat b = oracle::random_matrix(rng, m, m);
      const CMat ra = rep_matrix(a, basis, th);
      const CMat rb = rep_matrix(b, basis, th);
      CHECK(max_abs_diff(rep_matrix(a * b, basis, th), ra * rb) < 1e-11);
      CHECK(max_abs_diff(rep_matrix(a.adjoint(), basis, th), ra.adjoint()) < 1e-11);
    }
  }
}

TEST_CASE("transported projector coefficients") {
  const ThermalState th = thermal_state(oracle::qubit_model(std::log(2.0)));
  const GnsBasis basis(th);
  const double b0 = th.probs[0], b1 = th.probs[1];

  // Population projector |0><0|: reference weight b0, no mixing with the
  // transition elements.
  CMat p0(2, 2);
  p0(0, 0) = 1.0;
  const TransportedProjector td = transport_projector(p0, basis, th);
  CHECK(std::abs(td.at(0, 0, 0, 0) - cplx(b0)) < 1e-14);
  CHECK(std::abs(td.at(0, 0, 1, 0)) < 1e-14);
  CHECK(std::abs(td.at(0, 1, 0, 0)) < 1e-14);

  // Rotated projector (|0>+|1>)(<0|+<1|)/2: weight 1/2 and transition
  // coefficients sqrt(b)/2 on both sides.
  const TransportedProjector ts =
      transport_projector(oracle::plus_state(), basis, th);
  CHECK(std::abs(ts.at(0, 0, 0, 0) - cplx(0.5)) < 1e-14);
  CHECK(std::abs(ts.at(0, 0, 1, 0) - cplx(0.5 * std::sqrt(b1))) < 1e-14);
  CHECK(std::abs(ts.at(0, 1, 0, 0) - cplx(0.5 * std::sqrt(b0))) < 1e-14);
  // Raising-to-lowering ratio fixed by the Gibbs weights.
  const cplx r = ts.at(0, 1, 0, 0) / ts.at(0, 0, 1, 0);
  CHECK(std::abs(r - cplx(std::sqrt(b0 / b1))) < 1e-13);

  // Hermitian symmetry of the table.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          CHECK(std::abs(ts.at(i, j, k, l) - std::conj(ts.at(k, l, i, j))) < 1e-13);

  CHECK_THROWS_AS(transport_projector(CMat::from_rows({{0.5, 0.5}, {0.0, 0.5}}),
                                      basis, th),
                  ValidationError);
}

TEST_CASE("projector reference weight is bounded below by the Gibbs floor") {
  std::mt19937_64 rng(44);
  const ThermalState th = thermal_state(model_with_levels(2, 1.1));
  const GnsBasis basis(th);
  double floor = th.probs[0];
  for (double p : th.probs) floor = std::min(floor, p);
  for (int trial = 0; trial < 30; ++trial) {
    const CMat p = oracle::random_projector(rng, 3, 1 + trial % 2);
    const TransportedProjector tp = transport_projector(p, basis, th);
    CHECK(tp.at(0, 0, 0, 0).imag() == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(tp.at(0, 0, 0, 0).real() >= floor - 1e-12);
  }
}

TEST_CASE("thermal limit blocks have the stated form") {
  const InteractionModel m = model_with_levels(2, 0.8);
  const ThermalState th = thermal_state(m);
  const ThermalLimitBlocks blocks = thermal_limit_blocks(m);

  CMat want(2, 2);
  add_scaled(want, cplx(0.0, -1.0), m.h0);
  double shift = 0.0;
  for (int k = 1; k <= 2; ++k) shift += th.probs[k] * m.gammas[k - 1];
  want(0, 0) += cplx(0.0, -shift);
  want(1, 1) += cplx(0.0, -shift);
  for (int k = 1; k <= 2; ++k) {
    const CMat& c = m.couplings[k - 1];
    add_scaled(want, -0.5 * th.probs[0], c.adjoint() * c);
    add_scaled(want, -0.5 * th.probs[k], c * c.adjoint());
  }
  CHECK(max_abs_diff(blocks.to_00, want) < 1e-14);
  for (int k = 1; k <= 2; ++k) {
    CMat up = m.couplings[k - 1].adjoint();
    up *= cplx(0.0, -std::sqrt(th.probs[k]));
    CHECK(max_abs_diff(blocks.to_k0[k - 1], up) < 1e-15);
    CMat dn = m.couplings[k - 1];
    dn *= cplx(0.0, -std::sqrt(th.probs[0]));
    CHECK(max_abs_diff(blocks.to_0l[k - 1], dn) < 1e-15);
  }

  InteractionModel zero = m;
  zero.beta = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(thermal_limit_blocks(zero), ValidationError);
}

TEST_CASE("limit blocks are the asymptotics of the transported unitary") {
  const InteractionModel m = oracle::qubit_model(std::log(2.0));
  const ThermalState th = thermal_state(m);
  const GnsBasis basis(th);
  const ThermalLimitBlocks blocks = thermal_limit_blocks(m);

  std::vector<double> ns, r00, rk0, r0l;
  for (long n : {256L, 1024L, 4096L}) {
    const TransportedOperator t =
        transport_operator(build_unitary(m, n), basis, th, 2);
    CMat d00 = t.at(0, 0, 0, 0);
    for (int r = 0; r < 2; ++r) d00(r, r) -= 1.0;
    d00 *= cplx(static_cast<double>(n));
    const double s = std::sqrt(static_cast<double>(n));
    CMat uk = t.at(0, 0, 1, 0);
    uk *= cplx(s);
    CMat ul = t.at(0, 0, 0, 1);
    ul *= cplx(s);
    ns.push_back(static_cast<double>(n));
    r00.push_back(max_abs_diff(d00, blocks.to_00));
    rk0.push_back(max_abs_diff(uk, blocks.to_k0[0]));
    r0l.push_back(max_abs_diff(ul, blocks.to_0l[0]));
  }
  CHECK(r00.back() < 5e-3);
  CHECK(rk0.back() < 5e-3);
  CHECK(r0l.back() < 5e-3);
  CHECK(log_log_slope(ns, r00) < -0.9);
  CHECK(log_log_slope(ns, rk0) < -0.9);
  CHECK(log_log_slope(ns, r0l) < -0.9);
}

}  // TEST_SUITE
