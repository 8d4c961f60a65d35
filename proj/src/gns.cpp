#include "qtraj/gns.hpp"

#include <cmath>
#include <string>

namespace qtraj {
namespace {

void require_faithful(const ThermalState& th, const char* where) {
  if (!th.faithful())
    throw ValidationError(std::string(where) +
                          ": thermal state is not faithful (zero temperature)");
}

}  // namespace

cplx gns_inner(const CMat& a, const CMat& b, const ThermalState& th) {
  require_faithful(th, "gns_inner");
  const int m = th.dim();
  if (a.rows() != m || a.cols() != m || b.rows() != m || b.cols() != m)
    throw ValidationError("gns_inner: operator shape does not match bath");
  // Tr[rho (a^dagger b)] = sum_k beta_k sum_r conj(a(r,k)) b(r,k)
  cplx acc = 0.0;
  for (int k = 0; k < m; ++k) {
    cplx col = 0.0;
    for (int r = 0; r < m; ++r) col += std::conj(a(r, k)) * b(r, k);
    acc += th.probs[k] * col;
  }
  return acc;
}

GnsBasis::GnsBasis(const ThermalState& th) {
  require_faithful(th, "gns basis");
  m_ = th.dim();
  const int m = m_;
  x_.assign(static_cast<size_t>(m) * m, CMat());

  // Diagonal part: orthonormalize (1,..,1), e_1, .., e_N under the weighted
  // inner product sum_k beta_k x_k y_k.
  std::vector<std::vector<double>> ortho;
  ortho.push_back(std::vector<double>(m, 1.0));  // norm is sum beta = 1 exactly
  for (int c = 1; c < m; ++c) {
    std::vector<double> v(m, 0.0);
    v[c] = 1.0;
    for (const auto& u : ortho) {
      double proj = 0.0;
      for (int k = 0; k < m; ++k) proj += th.probs[k] * u[k] * v[k];
      for (int k = 0; k < m; ++k) v[k] -= proj * u[k];
    }
    double nrm2 = 0.0;
    for (int k = 0; k < m; ++k) nrm2 += th.probs[k] * v[k] * v[k];
    if (nrm2 < 1e-24)
      throw NumericalError("gns basis: diagonal candidate is near-dependent");
    const double nrm = std::sqrt(nrm2);
    for (double& z : v) z /= nrm;
    int last = -1;
    for (int k = 0; k < m; ++k)
      if (std::abs(v[k]) > 1e-12) last = k;
    if (last >= 0 && v[last] > 0.0)
      for (double& z : v) z = -z;
    ortho.push_back(std::move(v));
  }
  for (int i = 0; i < m; ++i) {
    CMat d(m, m);
    for (int k = 0; k < m; ++k) d(k, k) = ortho[i][k];
    x_[idx(i, i)] = std::move(d);
  }

  // Off-diagonal part: X^i_j = |j><i| / sqrt(beta_i).
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      CMat e(m, m);
      e(j, i) = 1.0 / std::sqrt(th.probs[i]);
      x_[idx(i, j)] = std::move(e);
    }
}

TransportedOperator::TransportedOperator(int dim, int levels)
    : d_(dim), m_(levels + 1) {
  blocks_.assign(static_cast<size_t>(m_) * m_ * m_ * m_, CMat(dim, dim));
}

TransportedOperator transport_operator(const CMat& k, const GnsBasis& basis,
                                       const ThermalState& th, int dim) {
  require_faithful(th, "transport_operator");
  const int m = th.dim();
  if (k.rows() != dim * m || k.cols() != dim * m)
    throw ValidationError("transport_operator: operator shape does not match d*(N+1)");

  TransportedOperator out(dim, m - 1);
  const CMat id_d = CMat::identity(dim);
  CMat right;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      CMat::mul_into(k, tensor(id_d, basis.element(i, j)), right);
      for (int kk = 0; kk < m; ++kk)
        for (int l = 0; l < m; ++l) {
          // W = rho_beta (X^k_l)^dagger acting on the bath factor;
          // block(r,s) = sum_{v,u} W(v,u) right(r*m+u, s*m+v).
          const CMat& xkl = basis.element(kk, l);
          CMat& blk = out.at(i, j, kk, l);
          for (int r = 0; r < dim; ++r)
            for (int s = 0; s < dim; ++s) {
              cplx acc = 0.0;
              for (int v = 0; v < m; ++v)
                for (int u = 0; u < m; ++u) {
                  const cplx w = th.probs[v] * std::conj(xkl(u, v));
                  if (w.real() == 0.0 && w.imag() == 0.0) continue;
                  acc += w * right(r * m + u, s * m + v);
                }
              blk(r, s) = acc;
            }
        }
    }
  return out;
}

cplx transport_coefficient(const CMat& op, int i, int j, int k, int l,
                           const GnsBasis& basis, const ThermalState& th) {
  require_faithful(th, "transport_coefficient");
  return gns_inner(basis.element(k, l), op * basis.element(i, j), th);
}

TransportedProjector::TransportedProjector(int levels) : m_(levels + 1) {
  c_.assign(static_cast<size_t>(m_) * m_ * m_ * m_, cplx{});
}

TransportedProjector transport_projector(const CMat& p, const GnsBasis& basis,
                                         const ThermalState& th) {
  require_faithful(th, "transport_projector");
  const int m = th.dim();
  if (p.rows() != m || p.cols() != m)
    throw ValidationError("transport_projector: shape does not match bath");
  if (p.herm_defect() > 1e-10)
    throw ValidationError("transport_projector: operator is not Hermitian");
  if (max_abs_diff(p * p, p) > 1e-10)
    throw ValidationError("transport_projector: operator is not idempotent");

  TransportedProjector out(m - 1);
  CMat px;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      CMat::mul_into(p, basis.element(i, j), px);
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          out.at(i, j, k, l) = gns_inner(basis.element(k, l), px, th);
    }
  return out;
}

ThermalLimitBlocks thermal_limit_blocks(const InteractionModel& model) {
  model.validate();
  if (model.zero_temperature())
    throw ValidationError("thermal_limit_blocks: requires finite beta");
  const ThermalState th = thermal_state(model);
  const int d = model.dim;
  const int nlev = model.levels;

  ThermalLimitBlocks out;
  out.to_00 = CMat(d, d);
  add_scaled(out.to_00, cplx(0.0, -1.0), model.h0);
  double shift = 0.0;
  for (int k = 1; k <= nlev; ++k) shift += th.probs[k] * model.gammas[k - 1];
  for (int r = 0; r < d; ++r) out.to_00(r, r) += cplx(0.0, -shift);
  CMat tmp(d, d);
  for (int k = 1; k <= nlev; ++k) {
    const CMat& c = model.couplings[k - 1];
    const CMat cd = c.adjoint();
    CMat::mul_into(cd, c, tmp);
    add_scaled(out.to_00, -0.5 * th.probs[0], tmp);
    CMat::mul_into(c, cd, tmp);
    add_scaled(out.to_00, -0.5 * th.probs[k], tmp);
  }
  for (int k = 1; k <= nlev; ++k) {
    CMat b = model.couplings[k - 1].adjoint();
    b *= cplx(0.0, -std::sqrt(th.probs[k]));
    out.to_k0.push_back(std::move(b));
  }
  for (int l = 1; l <= nlev; ++l) {
    CMat b = model.couplings[l - 1];
    b *= cplx(0.0, -std::sqrt(th.probs[0]));
    out.to_0l.push_back(std::move(b));
  }
  return out;
}

}  // namespace qtraj
