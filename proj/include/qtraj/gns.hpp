#pragma once

#include <vector>

#include "qtraj/model.hpp"

namespace qtraj {

// Inner product <a,b> = Tr[rho_beta a^dagger b] on bath operators.  Requires a
// faithful thermal state (all Gibbs weights positive), so finite temperature.
cplx gns_inner(const CMat& a, const CMat& b, const ThermalState& th);

// Orthonormal operator basis X^i_j for the GNS inner product.
//   X^0_0 = I.
//   Diagonal X^k_k: weighted Gram-Schmidt over the diagonal algebra, seeded
//   with (1,..,1) then the standard basis vectors e_1..e_N, with the phase
//   fixed so the last nonvanishing component is negative.
//   Off-diagonal X^i_j = |j><i| / sqrt(beta_i).
// The (i,j) element represents the transition with upper index i, lower j.
class GnsBasis {
public:
  explicit GnsBasis(const ThermalState& th);

  int levels() const { return m_ - 1; }
  int bath_dim() const { return m_; }
  const CMat& element(int i, int j) const { return x_[idx(i, j)]; }

private:
  int idx(int i, int j) const { return i * m_ + j; }
  int m_ = 0;
  std::vector<CMat> x_;
};

// Coefficients of an operator K on system (x) bath in the transported picture:
// K^{ij}_{kl} = Tr_env[(I (x) rho_beta) (I (x) X^k_l)^dagger K (I (x) X^i_j)],
// a d x d system operator per index pair.
class TransportedOperator {
public:
  TransportedOperator(int dim, int levels);
  int dim() const { return d_; }
  int levels() const { return m_ - 1; }
  const CMat& at(int i, int j, int k, int l) const { return blocks_[idx(i, j, k, l)]; }
  CMat& at(int i, int j, int k, int l) { return blocks_[idx(i, j, k, l)]; }

private:
  int idx(int i, int j, int k, int l) const {
    return ((i * m_ + j) * m_ + k) * m_ + l;
  }
  int d_ = 0, m_ = 0;
  std::vector<CMat> blocks_;
};

TransportedOperator transport_operator(const CMat& k, const GnsBasis& basis,
                                       const ThermalState& th, int dim);

// Scalar transported coefficient Tr[rho_beta (X^k_l)^dagger op X^i_j] for a
// bath-space operator.
cplx transport_coefficient(const CMat& op, int i, int j, int k, int l,
                           const GnsBasis& basis, const ThermalState& th);

// All scalar coefficients of a bath projector.  p^{00}_{00} is real and at
// least min_k beta_k for any nonzero projector, which is what rules out jump
// terms at positive temperature.
class TransportedProjector {
public:
  TransportedProjector(int levels);
  int levels() const { return m_ - 1; }
  cplx at(int i, int j, int k, int l) const { return c_[idx(i, j, k, l)]; }
  cplx& at(int i, int j, int k, int l) { return c_[idx(i, j, k, l)]; }

private:
  int idx(int i, int j, int k, int l) const {
    return ((i * m_ + j) * m_ + k) * m_ + l;
  }
  int m_ = 0;
  std::vector<cplx> c_;
};

TransportedProjector transport_projector(const CMat& p, const GnsBasis& basis,
                                         const ThermalState& th);

// Limits of the transported interaction blocks at finite temperature:
//   to_0l[l] = -i sqrt(beta_0) C_l          (limit of sqrt(n) U^{00}_{0l})
//   to_k0[k] = -i sqrt(beta_k) C_k^dagger   (limit of sqrt(n) U^{00}_{k0})
//   to_00    = -i h0 - i sum_k beta_k gamma_k I
//              - 1/2 sum_k (beta_0 C_k^dagger C_k + beta_k C_k C_k^dagger)
// (limit of n (U^{00}_{00} - I)); indices are 1-based via [k-1].
struct ThermalLimitBlocks {
  CMat to_00;
  std::vector<CMat> to_k0;
  std::vector<CMat> to_0l;
};
ThermalLimitBlocks thermal_limit_blocks(const InteractionModel& model);

}  // namespace qtraj
