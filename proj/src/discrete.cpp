#include "qtraj/discrete.hpp"

#include <cmath>
#include <string>

namespace qtraj {

void Observable::validate(int bath_dim) const {
  const int m = num_outcomes();
  if (m < 1) throw ValidationError("observable: needs at least one outcome");
  if (static_cast<int>(eigenvalues.size()) != m)
    throw ValidationError("observable: eigenvalue/projector count mismatch");
  for (int i = 1; i < m; ++i)
    if (!(eigenvalues[i] > eigenvalues[i - 1]))
      throw ValidationError("observable: eigenvalues must be strictly increasing");
  CMat sum(bath_dim, bath_dim);
  for (int i = 0; i < m; ++i) {
    const CMat& p = projectors[i];
    if (p.rows() != bath_dim || p.cols() != bath_dim)
      throw ValidationError("observable: projector " + std::to_string(i) +
                            " has wrong shape");
    if (p.herm_defect() > 1e-10)
      throw ValidationError("observable: projector " + std::to_string(i) +
                            " is not Hermitian");
    if (max_abs_diff(p * p, p) > 1e-10)
      throw ValidationError("observable: projector " + std::to_string(i) +
                            " is not idempotent");
    for (int j = 0; j < i; ++j)
      if ((p * projectors[j]).max_abs() > 1e-10)
        throw ValidationError("observable: projectors " + std::to_string(j) +
                              " and " + std::to_string(i) + " are not orthogonal");
    sum += p;
  }
  if (max_abs_diff(sum, CMat::identity(bath_dim)) > 1e-10)
    throw ValidationError("observable: projectors do not resolve the identity");
}

Observable diagonal_observable(int levels) {
  const int m = levels + 1;
  Observable obs;
  for (int i = 0; i < m; ++i) {
    obs.eigenvalues.push_back(static_cast<double>(i));
    CMat p(m, m);
    p(i, i) = 1.0;
    obs.projectors.push_back(std::move(p));
  }
  return obs;
}

Observable symmetric_observable() {
  Observable obs;
  obs.eigenvalues = {-1.0, 1.0};
  obs.projectors.push_back(CMat::from_rows({{0.5, 0.5}, {0.5, 0.5}}));
  obs.projectors.push_back(CMat::from_rows({{0.5, -0.5}, {-0.5, 0.5}}));
  return obs;
}

Observable trivial_observable(int bath_dim) {
  Observable obs;
  obs.eigenvalues = {0.0};
  obs.projectors.push_back(CMat::identity(bath_dim));
  return obs;
}

KrausFamily::KrausFamily(const InteractionModel& model, const Observable& obs, long n) {
  model.validate();
  obs.validate(model.bath_dim());
  dim_ = model.dim;
  n_ = n;
  const int d = model.dim;
  const int m = model.bath_dim();
  const CMat u = build_unitary(model, n);
  const ThermalState th = thermal_state(model);
  const CMat id_d = CMat::identity(d);

  outcomes_.resize(obs.num_outcomes());
  for (int i = 0; i < obs.num_outcomes(); ++i) {
    const CMat mi = tensor(id_d, obs.projectors[i]) * u;
    Outcome& out = outcomes_[i];
    out.effect = CMat(d, d);
    CMat tmp(d, d);
    for (int a = 0; a < m; ++a) {
      for (int v = 0; v < m; ++v) {
        if (th.probs[v] == 0.0) continue;
        CMat k = block(mi, a, v, d, m);
        if (k.max_abs() == 0.0) continue;
        k *= std::sqrt(th.probs[v]);
        CMat::mul_into(k.adjoint(), k, tmp);
        out.effect += tmp;
        out.kraus.push_back(std::move(k));
      }
    }
  }

  CMat total(d, d);
  for (const Outcome& out : outcomes_) total += out.effect;
  if (max_abs_diff(total, id_d) > 1e-10)
    throw NumericalError("kraus family: effects do not sum to the identity");
}

void KrausFamily::apply_into(int i, const CMat& rho, CMat& out, CMat& tmp) const {
  out.resize(dim_, dim_);
  tmp.resize(dim_, dim_);
  for (const CMat& k : outcomes_[i].kraus) {
    CMat::mul_into(k, rho, tmp);
    // out += (K rho) K^dagger, accumulated entrywise to avoid forming K^dagger.
    for (int r = 0; r < dim_; ++r)
      for (int s = 0; s < dim_; ++s) {
        cplx acc = 0.0;
        for (int c = 0; c < dim_; ++c) acc += tmp(r, c) * std::conj(k(s, c));
        out(r, s) += acc;
      }
  }
}

CMat KrausFamily::apply(int i, const CMat& rho) const {
  CMat out, tmp;
  apply_into(i, rho, out, tmp);
  return out;
}

void KrausFamily::probabilities_into(const CMat& rho, std::vector<double>& p) const {
  const int m = num_outcomes();
  p.resize(m);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    p[i] = real_expectation(rho, outcomes_[i].effect);
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-8)
    throw NumericalError("outcome probabilities sum to " + std::to_string(sum));
  for (double& v : p) {
    v = std::min(std::max(v / sum, 0.0), 1.0);
  }
}

std::vector<double> KrausFamily::probabilities(const CMat& rho) const {
  std::vector<double> p;
  probabilities_into(rho, p);
  return p;
}

CMat KrausFamily::channel_apply(const CMat& rho) const {
  CMat out(dim_, dim_), part, tmp;
  for (int i = 0; i < num_outcomes(); ++i) {
    apply_into(i, rho, part, tmp);
    out += part;
  }
  return out;
}

KrausFamily unconditioned_channel(const InteractionModel& model, long n) {
  return KrausFamily(model, trivial_observable(model.bath_dim()), n);
}

namespace {

constexpr double kProbFloor = 1e-14;

int sample_outcome(const std::vector<double>& p, RandomStream& rng) {
  const double u = rng.next_uniform();
  double cum = 0.0;
  int last_eligible = -1;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    if (p[i] <= kProbFloor) continue;
    last_eligible = i;
    cum += p[i];
    if (u <= cum) return i;
  }
  if (last_eligible < 0)
    throw NumericalError("step: all outcome probabilities below 1e-14");
  return last_eligible;
}

}  // namespace

StepResult step(const DensityMatrix& state, const KrausFamily& fam, RandomStream& rng) {
  std::vector<double> p = fam.probabilities(state.mat());
  const int i = sample_outcome(p, rng);
  CMat next = fam.apply(i, state.mat());
  const double tr = next.trace().real();
  if (tr <= kProbFloor) throw NumericalError("step: conditioned state has zero trace");
  next *= 1.0 / tr;
  EighWork wk;
  project_state_inplace(next, wk);
  return StepResult{i, DensityMatrix::unchecked(std::move(next))};
}

DiscretePath run_trajectory(const DensityMatrix& rho0, const InteractionModel& model,
                            const Observable& obs, long n, double horizon,
                            uint64_t seed) {
  if (rho0.dim() != model.dim)
    throw ValidationError("run_trajectory: state dimension does not match model");
  if (horizon <= 0.0) throw ValidationError("run_trajectory: horizon must be positive");
  const KrausFamily fam(model, obs, n);
  const long steps = static_cast<long>(std::floor(horizon * static_cast<double>(n) + 1e-9));

  DiscretePath path;
  path.seed = seed;
  path.n = n;
  path.times.reserve(steps + 1);
  path.states.reserve(steps + 1);
  path.outcomes.reserve(steps);
  path.times.push_back(0.0);
  path.states.push_back(rho0);

  DiscreteStepper walker(fam, rho0.mat(), derive_stream_key(seed, 0, 0, StreamPurpose::Outcome));
  for (long k = 1; k <= steps; ++k) {
    path.outcomes.push_back(walker.step());
    path.times.push_back(static_cast<double>(k) / static_cast<double>(n));
    path.states.push_back(DensityMatrix::unchecked(walker.state()));
  }
  return path;
}

DiscreteStepper::DiscreteStepper(const KrausFamily& fam, const CMat& rho0,
                                 uint64_t stream_key)
    : fam_(&fam), rho_(rho0), rng_(stream_key) {
  next_.resize(fam.dim(), fam.dim());
  tmp_.resize(fam.dim(), fam.dim());
}

int DiscreteStepper::step() {
  fam_->probabilities_into(rho_, probs_);
  const int i = sample_outcome(probs_, rng_);
  fam_->apply_into(i, rho_, next_, tmp_);
  const double tr = next_.trace().real();
  if (tr <= kProbFloor)
    throw NumericalError("step: conditioned state has zero trace");
  next_ *= 1.0 / tr;
  std::swap(rho_, next_);
  max_repair_ = std::max(max_repair_, project_state_inplace(rho_, wk_));
  ++steps_;
  return i;
}

}  // namespace qtraj
