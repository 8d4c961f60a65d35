#pragma once

#include <string>
#include <vector>

#include "qtraj/sde.hpp"

namespace qtraj {

// Linear observable of the system state, reported as Tr[rho op].
struct Functional {
  std::string name;
  CMat op;
};
std::vector<Functional> pauli_functionals();

// Everything needed to run one scenario under either engine.
struct RunSpec {
  InteractionModel model;
  Observable obs;
  CMat rho0;
  long n = 1024;      // interactions per unit time (discrete engine)
  double dt = 1e-3;   // Euler step (continuous engine)
  double horizon = 1.0;
  std::vector<double> checkpoints;  // sorted, in (0, horizon]
  std::vector<Functional> functionals;

  void validate() const;
};

enum class Engine { Discrete, Continuous };

// Per-checkpoint ensemble statistics.  Identical bytes for identical
// (spec, paths, seed) regardless of the thread count: every path draws from
// streams keyed by its index alone and the reduction runs in index order.
struct EnsembleSummary {
  Engine engine = Engine::Discrete;
  long paths = 0;
  uint64_t seed = 0;
  long n = 0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<CMat> mean_states;
  std::vector<std::string> functional_names;
  // Indexed [checkpoint][functional].
  std::vector<std::vector<double>> mean, var, se_mean, se_var;

  // Jump statistics (zero-temperature continuous runs only).  paired_diff is
  // the per-path jump count minus the path's integrated intensity; its mean
  // vanishes for the correctly compensated process.
  bool has_jump_stats = false;
  double jump_count_mean = 0.0, jump_count_se = 0.0;
  double intensity_mean = 0.0, intensity_se = 0.0;
  double paired_diff_mean = 0.0, paired_diff_se = 0.0;

  double max_repair = 0.0;
  double trace_drift = 0.0;
  bool intensity_warning = false;
};

EnsembleSummary ensemble_run(Engine engine, const RunSpec& spec, long paths,
                             uint64_t seed, int threads);

// Mean-vs-deterministic-reference comparison.  A row passes when
// |deviation| <= 3 se + atol; atol absorbs the first-order bias of the
// schemes, kMeanTolPerDt times the scheme step.
constexpr double kMeanTolPerDt = 5.0;

struct MeanMasterRow {
  double time = 0.0;
  std::string functional;
  double ensemble_mean = 0.0;
  double se = 0.0;
  double ode_value = 0.0;
  double deviation = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct MeanMasterReport {
  std::vector<MeanMasterRow> rows;
  double atol = 0.0;
  bool pass = false;
  std::string render() const;
};

MeanMasterReport mean_vs_master(const EnsembleSummary& summary,
                                const ContinuousPath& ode,
                                const std::vector<Functional>& fns, double atol);

// Discrete-resolution sweep against a fixed reference summary; deviations are
// taken at the last checkpoint.
struct ConvergenceTable {
  std::vector<long> ns;
  std::vector<std::string> fn_names;
  // Indexed [n][functional].
  std::vector<std::vector<double>> mean_err, mean_se, var_err, var_se;
  std::vector<double> slope;  // log-log slope of mean_err against n
  std::string render() const;
};

ConvergenceTable convergence_table(const RunSpec& spec, const std::vector<long>& ns,
                                   long paths, uint64_t seed, int threads,
                                   const EnsembleSummary& reference);

// Least-squares slope of ln(y) against ln(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qtraj
