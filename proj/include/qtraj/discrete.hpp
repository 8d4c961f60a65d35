#pragma once

#include <cstdint>
#include <vector>

#include "qtraj/model.hpp"
#include "qtraj/rng.hpp"

namespace qtraj {

// Bath observable measured after each interaction: spectral decomposition
// sum_i eigenvalues[i] projectors[i] on C^(N+1), eigenvalues strictly
// increasing, projectors an orthogonal resolution of the identity.
struct Observable {
  std::vector<double> eigenvalues;
  std::vector<CMat> projectors;

  int num_outcomes() const { return static_cast<int>(projectors.size()); }
  int bath_dim() const { return projectors.empty() ? 0 : projectors[0].rows(); }
  void validate(int bath_dim) const;
};

// Population measurement: projectors onto the individual bath levels.
Observable diagonal_observable(int levels);
// For one excited level: projectors onto (|0> +- |1>)/sqrt(2).
Observable symmetric_observable();
// Single-outcome observable (measure nothing).
Observable trivial_observable(int bath_dim);

// Conditioned evolution maps L_i(rho) = Tr_env[(I (x) P_i) U (rho (x) rho_beta)
// U^dagger (I (x) P_i)], stored in Kraus form
//   L_i(rho) = sum_j K_{ij} rho K_{ij}^dagger
// together with the POVM effects E_i = sum_j K_{ij}^dagger K_{ij} so outcome
// probabilities cost one inner product each.
class KrausFamily {
public:
  KrausFamily(const InteractionModel& model, const Observable& obs, long n);

  int dim() const { return dim_; }
  long n() const { return n_; }
  int num_outcomes() const { return static_cast<int>(outcomes_.size()); }
  const std::vector<CMat>& kraus_ops(int i) const { return outcomes_[i].kraus; }
  const CMat& effect(int i) const { return outcomes_[i].effect; }

  CMat apply(int i, const CMat& rho) const;
  // out = L_i(rho); tmp is d x d scratch.
  void apply_into(int i, const CMat& rho, CMat& out, CMat& tmp) const;

  // Outcome probabilities Tr[E_i rho], clipped to [0,1] and renormalized.
  // Throws NumericalError when the raw sum strays from 1 by more than 1e-8.
  std::vector<double> probabilities(const CMat& rho) const;
  void probabilities_into(const CMat& rho, std::vector<double>& p) const;

  // Unconditioned channel sum_i L_i(rho).
  CMat channel_apply(const CMat& rho) const;

private:
  struct Outcome {
    std::vector<CMat> kraus;
    CMat effect;
  };
  int dim_ = 0;
  long n_ = 0;
  std::vector<Outcome> outcomes_;
};

// The channel alone, built with the trivial observable.
KrausFamily unconditioned_channel(const InteractionModel& model, long n);

struct StepResult {
  int outcome = 0;
  DensityMatrix state;
};

// One measurement step: sample outcome i with probability Tr[E_i rho], apply
// L_i and renormalize.  Outcomes with probability <= 1e-14 are never selected;
// all probabilities below that floor is an error.
StepResult step(const DensityMatrix& state, const KrausFamily& fam, RandomStream& rng);

struct DiscretePath {
  uint64_t seed = 0;
  long n = 0;
  std::vector<double> times;      // k/n
  std::vector<int> outcomes;      // outcomes[k] produced states[k+1]
  std::vector<DensityMatrix> states;
};

DiscretePath run_trajectory(const DensityMatrix& rho0, const InteractionModel& model,
                            const Observable& obs, long n, double horizon,
                            uint64_t seed);

// Allocation-free walker over one trajectory; the ensemble driver keeps one
// per path and shares the KrausFamily.
class DiscreteStepper {
public:
  DiscreteStepper(const KrausFamily& fam, const CMat& rho0, uint64_t stream_key);

  int step();  // returns the sampled outcome
  const CMat& state() const { return rho_; }
  long steps_done() const { return steps_; }
  double max_repair() const { return max_repair_; }

private:
  const KrausFamily* fam_;
  CMat rho_, next_, tmp_;
  std::vector<double> probs_;
  EighWork wk_;
  RandomStream rng_;
  long steps_ = 0;
  double max_repair_ = 0.0;
};

}  // namespace qtraj
