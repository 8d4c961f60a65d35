#pragma once

#include <vector>

#include "qtraj/matrix.hpp"

namespace qtraj {

// One system of dimension d repeatedly coupled to fresh bath copies of
// dimension N+1.  Bath level 0 is the reference level (energy 0); level k has
// energy gamma_k and couples to the system through the operator coupling[k-1].
// beta is the bath inverse temperature; +infinity selects the ground bath.
struct InteractionModel {
  int dim = 0;                  // system dimension d
  int levels = 0;               // N, number of excited bath levels
  CMat h0;                      // system Hamiltonian, d x d
  std::vector<CMat> couplings;  // C_1..C_N, each d x d
  std::vector<double> gammas;   // bath level energies gamma_1..gamma_N
  double beta = 0.0;            // inverse temperature, (0, +inf]

  int bath_dim() const { return levels + 1; }
  int total_dim() const { return dim * (levels + 1); }
  bool zero_temperature() const;

  // Throws ValidationError naming the offending field.
  void validate() const;
};

// Gibbs weights of the bath: probs[k] proportional to exp(-beta gamma_k)
// with gamma_0 = 0.  At beta = +inf this is (1, 0, ..., 0).
struct ThermalState {
  std::vector<double> probs;
  int dim() const { return static_cast<int>(probs.size()); }
  CMat matrix() const { return CMat::diag_real(probs); }
  bool faithful() const;
};
ThermalState thermal_state(const InteractionModel& model);

// H(n) = h0 (x) I + I (x) diag(0, gamma) + sqrt(n) sum_k (C_k (x) |k><0| +
// C_k^dagger (x) |0><k|), on C^d (x) C^(N+1) with the system factor first.
CMat build_h_total(const InteractionModel& model, long n);

// U(n) = exp(-i H(n) / n), one interaction of duration 1/n.
CMat build_unitary(const InteractionModel& model, long n);

// First-order limits of the interaction blocks at zero temperature:
// out[0] = -i h0 - 1/2 sum_k C_k^dagger C_k (limit of n (U_{00} - I)),
// out[k] = -i C_k (limit of sqrt(n) U_{k0}).
std::vector<CMat> zero_temp_limit_blocks(const InteractionModel& model);

}  // namespace qtraj
