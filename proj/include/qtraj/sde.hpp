#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qtraj/discrete.hpp"
#include "qtraj/gns.hpp"

namespace qtraj {

// ---------------------------------------------------------------------------
// Limit coefficients
// ---------------------------------------------------------------------------

// Zero temperature.  With L_0 = -i h0 - 1/2 sum C^dagger C and L_k = -i C_k,
// outcome i of the measured observable contributes
//   diffusive noise  h_i = (B_i rho + rho B_i^dagger - Tr[..] rho)/sqrt(p00_i)
//     with B_i = sum_{k>=1} P_i(k,0) L_k, whenever p00_i = P_i(0,0) > 0,
//   or a jump with intensity v_i = Tr[D_i(rho)] and target D_i(rho)/v_i,
//     D_i(rho) = sum_{k,l>=1} P_i(k,l) L_k rho L_l^dagger, when p00_i = 0.
// Channels are relabeled so channel 0 always has p00 > 0; label keeps the
// original outcome index.
struct ZeroTempCoefficients {
  int dim = 0;
  int levels = 0;
  std::vector<CMat> limits;  // L_0..L_N

  struct Channel {
    int label = 0;
    double p00 = 0.0;
    bool is_jump = false;
    bool has_noise = false;  // noise_op nonzero
    CMat noise_op;           // B_i / sqrt(p00), zero matrix for jump channels
    std::vector<cplx> pkl;   // P_i(k,l), k,l = 1..levels, row-major
  };
  std::vector<Channel> channels;
  std::vector<int> jump_set;       // channel indices with p00 = 0 (within 1e-12)
  std::vector<int> diffusive_set;  // the rest, channel 0 included
};
ZeroTempCoefficients zero_temp_coefficients(const InteractionModel& model,
                                            const Observable& obs);

// Positive temperature.  Every outcome has p00(m) = Tr[rho_beta P_m] >=
// min_k beta_k > 0, so there are no jump channels; each outcome carries the
// diffusive noise built from the transported blocks,
//   A_m = sum_{k>=1} (p^{00}_{k0}(m) L_{k0} + p^{00}_{0k}(m) L_{0k}),
//   h_m = (A_m rho + rho A_m^dagger - Tr[..] rho)/sqrt(p00_m).
struct ThermalCoefficients {
  int dim = 0;
  int levels = 0;
  ThermalLimitBlocks blocks;
  CMat h0;
  std::vector<CMat> couplings;
  std::vector<double> betas;  // Gibbs weights beta_0..beta_N
  CMat dissipator_g;          // 1/2 sum_k (b0 Ck^dag Ck + bk Ck Ck^dag)

  struct Channel {
    int label = 0;
    double p00 = 0.0;
    bool has_noise = false;
    CMat noise_op;  // A_m / sqrt(p00)
  };
  std::vector<Channel> channels;
  std::vector<int> jump_set;  // empty at positive temperature; kept as a check
};
ThermalCoefficients thermal_coefficients(const InteractionModel& model,
                                         const Observable& obs);

// ---------------------------------------------------------------------------
// Coefficient evaluation
// ---------------------------------------------------------------------------

// Lindblad drift sum L_0 rho + rho L_0^dagger + sum_k L_k rho L_k^dagger from
// the zero-temperature limit blocks.
CMat lindblad_zero(const CMat& rho, const std::vector<CMat>& limits);

// Two-sided thermal Lindblad drift,
//   -i[h0,rho] + sum_k b0 (Ck rho Ck^d - 1/2 {Ck^d Ck, rho})
//              + sum_k bk (Ck^d rho Ck - 1/2 {Ck Ck^d, rho}).
CMat lindblad_thermal(const CMat& rho, const InteractionModel& model);

CMat diffusive_h(const CMat& rho, int channel, const ZeroTempCoefficients& co);
CMat diffusive_h_thermal(const CMat& rho, int channel, const ThermalCoefficients& co);

double jump_intensity(const CMat& rho, int channel, const ZeroTempCoefficients& co);
// g_i = D_i(rho)/v_i - rho; the zero matrix when the intensity is below 1e-14.
CMat jump_g(const CMat& rho, int channel, const ZeroTempCoefficients& co);

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

struct JumpEvent {
  double time = 0.0;
  int channel = 0;  // original outcome label
};

struct ContinuousPath {
  uint64_t seed = 0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<JumpEvent> jump_log;
  double max_repair = 0.0;       // max per-step projection distance
  double trace_drift = 0.0;      // accumulated |Tr - 1| before repair
  double intensity_integral = 0.0;
  bool intensity_warning = false;  // some v dt exceeded 0.1
};

// Euler step of the jump-diffusion: drift dt + sum_m h_m dW_m + thinned jumps
// with their compensators.  Brownian and thinning draws come from streams
// keyed (seed, path, channel, purpose), so paths and channels are independent
// and reproducible regardless of scheduling.
class ZeroTempSdeStepper {
public:
  ZeroTempSdeStepper(const ZeroTempCoefficients& co, const CMat& rho0, double dt,
                     uint64_t master_seed, uint64_t path_index);

  void step();
  const CMat& state() const { return rho_; }
  double time() const { return t_; }
  long steps_done() const { return steps_; }
  const std::vector<JumpEvent>& jumps() const { return jumps_; }
  double intensity_integral() const { return intensity_integral_; }
  double max_repair() const { return max_repair_; }
  double trace_drift() const { return trace_drift_; }
  bool intensity_warning() const { return intensity_warning_; }

private:
  const ZeroTempCoefficients* co_;
  double dt_, sqrt_dt_, t_ = 0.0;
  long steps_ = 0;
  CMat rho_, out_, coef_, t1_, t2_;
  std::vector<CMat> lrho_;  // L_k rho per excited level
  std::vector<RandomStream> noise_rng_, jump_rng_;
  std::vector<JumpEvent> jumps_;
  EighWork wk_;
  double intensity_integral_ = 0.0, max_repair_ = 0.0, trace_drift_ = 0.0;
  bool intensity_warning_ = false;
};

class ThermalSdeStepper {
public:
  ThermalSdeStepper(const ThermalCoefficients& co, const CMat& rho0, double dt,
                    uint64_t master_seed, uint64_t path_index);

  void step();
  const CMat& state() const { return rho_; }
  double time() const { return t_; }
  long steps_done() const { return steps_; }
  double max_repair() const { return max_repair_; }
  double trace_drift() const { return trace_drift_; }

private:
  const ThermalCoefficients* co_;
  double dt_, sqrt_dt_, t_ = 0.0;
  long steps_ = 0;
  CMat rho_, out_, coef_, t1_, t2_;
  std::vector<RandomStream> noise_rng_;
  EighWork wk_;
  double max_repair_ = 0.0, trace_drift_ = 0.0;
};

ContinuousPath integrate_zero_temp(const DensityMatrix& rho0,
                                   const ZeroTempCoefficients& co, double dt,
                                   double horizon, uint64_t seed);
ContinuousPath integrate_thermal(const DensityMatrix& rho0,
                                 const InteractionModel& model, const Observable& obs,
                                 double dt, double horizon, uint64_t seed);

// Deterministic reference: classical RK4 on d rho/dt = drift(rho).
using DriftFn = std::function<void(const CMat& rho, CMat& out)>;
DriftFn make_zero_temp_drift(const InteractionModel& model);
DriftFn make_thermal_drift(const InteractionModel& model);
ContinuousPath solve_master_ode(const DensityMatrix& rho0, const DriftFn& drift,
                                double dt, double horizon);

}  // namespace qtraj
