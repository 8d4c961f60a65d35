#include "qtraj/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace qtraj {

bool InteractionModel::zero_temperature() const { return std::isinf(beta); }

void InteractionModel::validate() const {
  if (dim < 1) throw ValidationError("model.dim: must be >= 1");
  if (levels < 1) throw ValidationError("model.levels: must be >= 1");
  if (h0.rows() != dim || h0.cols() != dim)
    throw ValidationError("model.h0: expected " + std::to_string(dim) + "x" +
                          std::to_string(dim) + " matrix");
  if (h0.herm_defect() > 1e-10)
    throw ValidationError("model.h0: not Hermitian (defect " +
                          std::to_string(h0.herm_defect()) + ")");
  if (static_cast<int>(couplings.size()) != levels)
    throw ValidationError("model.couplings: expected " + std::to_string(levels) +
                          " operators");
  for (int k = 0; k < levels; ++k)
    if (couplings[k].rows() != dim || couplings[k].cols() != dim)
      throw ValidationError("model.couplings[" + std::to_string(k) +
                            "]: expected " + std::to_string(dim) + "x" +
                            std::to_string(dim) + " matrix");
  if (static_cast<int>(gammas.size()) != levels)
    throw ValidationError("model.gammas: expected " + std::to_string(levels) +
                          " energies");
  if (std::isnan(beta) || beta <= 0.0)
    throw ValidationError("model.beta: must be positive or \"inf\"");
}

bool ThermalState::faithful() const {
  for (double p : probs)
    if (p <= 0.0) return false;
  return true;
}

ThermalState thermal_state(const InteractionModel& model) {
  model.validate();
  ThermalState th;
  th.probs.assign(model.levels + 1, 0.0);
  if (model.zero_temperature()) {
    th.probs[0] = 1.0;
    return th;
  }
  double z = 1.0;
  th.probs[0] = 1.0;
  for (int k = 1; k <= model.levels; ++k) {
    th.probs[k] = std::exp(-model.beta * model.gammas[k - 1]);
    z += th.probs[k];
  }
  for (double& p : th.probs) p /= z;
  return th;
}

CMat build_h_total(const InteractionModel& model, long n) {
  model.validate();
  if (n < 1) throw ValidationError("build_h_total: n must be >= 1");
  const int d = model.dim;
  const int m = model.bath_dim();
  const double lam = std::sqrt(static_cast<double>(n));

  CMat h(d * m, d * m);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      for (int v = 0; v < m; ++v) h(r * m + v, s * m + v) += model.h0(r, s);
  for (int r = 0; r < d; ++r)
    for (int k = 1; k < m; ++k) h(r * m + k, r * m + k) += model.gammas[k - 1];
  for (int k = 1; k < m; ++k) {
    const CMat& c = model.couplings[k - 1];
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) {
        h(r * m + k, s * m + 0) += lam * c(r, s);
        h(r * m + 0, s * m + k) += lam * std::conj(c(s, r));
      }
  }
  return h;
}

CMat build_unitary(const InteractionModel& model, long n) {
  return expm_hermitian(build_h_total(model, n), 1.0 / static_cast<double>(n));
}

std::vector<CMat> zero_temp_limit_blocks(const InteractionModel& model) {
  model.validate();
  const int d = model.dim;
  std::vector<CMat> out;
  out.reserve(model.levels + 1);

  CMat l0(d, d);
  add_scaled(l0, cplx(0.0, -1.0), model.h0);
  CMat tmp(d, d);
  for (const CMat& c : model.couplings) {
    CMat::mul_into(c.adjoint(), c, tmp);
    add_scaled(l0, -0.5, tmp);
  }
  out.push_back(std::move(l0));
  for (const CMat& c : model.couplings) {
    CMat lk = c;
    lk *= cplx(0.0, -1.0);
    out.push_back(std::move(lk));
  }
  return out;
}

}  // namespace qtraj
