#include "qtraj/sde.hpp"

#include <cmath>
#include <string>

namespace qtraj {
namespace {

constexpr double kJumpClassifyTol = 1e-12;
constexpr double kIntensityFloor = 1e-14;
constexpr double kIntensityWarnLevel = 0.1;

void check_dt(double dt) {
  if (!(dt > 0.0) || dt > 1e-2)
    throw ValidationError("sde: dt must lie in (0, 1e-2]");
}

// out = T + T^dagger - Tr[T + T^dagger] rho with T := a * rho; traceless by
// construction.  Shared shape of both diffusive coefficients.
void two_sided_noise(const CMat& a, const CMat& rho, CMat& t1, CMat& out) {
  const int d = rho.rows();
  CMat::mul_into(a, rho, t1);
  out.resize(d, d);
  double tr2 = 0.0;
  for (int r = 0; r < d; ++r) tr2 += 2.0 * t1(r, r).real();
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      out(r, s) = t1(r, s) + std::conj(t1(s, r)) - tr2 * rho(r, s);
}

// out += w * (a rho a^dagger) given t1 = a rho already formed.
void sandwich_acc_from(const CMat& t1, const CMat& a, cplx w, CMat& out) {
  const int d = out.rows();
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) {
      cplx acc = 0.0;
      for (int c = 0; c < d; ++c) acc += t1(r, c) * std::conj(a(s, c));
      out(r, s) += w * acc;
    }
}

}  // namespace

ZeroTempCoefficients zero_temp_coefficients(const InteractionModel& model,
                                            const Observable& obs) {
  model.validate();
  obs.validate(model.bath_dim());
  if (!model.zero_temperature())
    throw ValidationError("zero_temp_coefficients: model has finite beta");

  ZeroTempCoefficients co;
  co.dim = model.dim;
  co.levels = model.levels;
  co.limits = zero_temp_limit_blocks(model);

  const int nlev = model.levels;
  const int nout = obs.num_outcomes();
  co.channels.resize(nout);
  for (int i = 0; i < nout; ++i) {
    const CMat& p = obs.projectors[i];
    auto& ch = co.channels[i];
    ch.label = i;
    ch.p00 = p(0, 0).real();
    ch.is_jump = ch.p00 <= kJumpClassifyTol;
    ch.pkl.resize(static_cast<size_t>(nlev) * nlev);
    for (int k = 1; k <= nlev; ++k)
      for (int l = 1; l <= nlev; ++l)
        ch.pkl[(k - 1) * nlev + (l - 1)] = p(k, l);
    ch.noise_op = CMat(model.dim, model.dim);
    if (!ch.is_jump) {
      for (int k = 1; k <= nlev; ++k)
        add_scaled(ch.noise_op, p(k, 0) / std::sqrt(ch.p00), co.limits[k]);
    }
    ch.has_noise = ch.noise_op.max_abs() > 0.0;
  }

  // Channel 0 must carry weight on the reference level; swap in the heaviest
  // outcome if the given ordering starts with a jump outcome.
  if (co.channels[0].is_jump) {
    int best = 0;
    for (int i = 1; i < nout; ++i)
      if (co.channels[i].p00 > co.channels[best].p00) best = i;
    if (best == 0)
      throw NumericalError("zero_temp_coefficients: no outcome sees the reference level");
    std::swap(co.channels[0], co.channels[best]);
  }

  for (int i = 0; i < nout; ++i)
    (co.channels[i].is_jump ? co.jump_set : co.diffusive_set).push_back(i);
  return co;
}

ThermalCoefficients thermal_coefficients(const InteractionModel& model,
                                         const Observable& obs) {
  model.validate();
  obs.validate(model.bath_dim());
  if (model.zero_temperature())
    throw ValidationError("thermal_coefficients: requires finite beta");

  ThermalCoefficients co;
  co.dim = model.dim;
  co.levels = model.levels;
  co.blocks = thermal_limit_blocks(model);
  co.h0 = model.h0;
  co.couplings = model.couplings;
  const ThermalState th = thermal_state(model);
  co.betas = th.probs;

  const int d = model.dim;
  co.dissipator_g = CMat(d, d);
  CMat tmp(d, d);
  for (int k = 1; k <= model.levels; ++k) {
    const CMat& c = model.couplings[k - 1];
    const CMat cd = c.adjoint();
    CMat::mul_into(cd, c, tmp);
    add_scaled(co.dissipator_g, 0.5 * th.probs[0], tmp);
    CMat::mul_into(c, cd, tmp);
    add_scaled(co.dissipator_g, 0.5 * th.probs[k], tmp);
  }

  const GnsBasis basis(th);
  const int nout = obs.num_outcomes();
  co.channels.resize(nout);
  for (int m = 0; m < nout; ++m) {
    const TransportedProjector tp = transport_projector(obs.projectors[m], basis, th);
    auto& ch = co.channels[m];
    ch.label = m;
    ch.p00 = tp.at(0, 0, 0, 0).real();
    if (ch.p00 <= kJumpClassifyTol) {
      co.jump_set.push_back(m);
      throw NumericalError(
          "thermal_coefficients: outcome " + std::to_string(m) +
          " has vanishing reference weight at positive temperature");
    }
    const double inv = 1.0 / std::sqrt(ch.p00);
    ch.noise_op = CMat(d, d);
    for (int k = 1; k <= model.levels; ++k) {
      add_scaled(ch.noise_op, inv * tp.at(0, 0, k, 0), co.blocks.to_k0[k - 1]);
      add_scaled(ch.noise_op, inv * tp.at(0, 0, 0, k), co.blocks.to_0l[k - 1]);
    }
    ch.has_noise = ch.noise_op.max_abs() > 0.0;
  }
  return co;
}

CMat lindblad_zero(const CMat& rho, const std::vector<CMat>& limits) {
  const int d = rho.rows();
  CMat out(d, d), t1(d, d);
  CMat::mul_into(limits[0], rho, t1);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) out(r, s) = t1(r, s) + std::conj(t1(s, r));
  for (size_t k = 1; k < limits.size(); ++k) {
    CMat::mul_into(limits[k], rho, t1);
    sandwich_acc_from(t1, limits[k], 1.0, out);
  }
  return out;
}

CMat lindblad_thermal(const CMat& rho, const InteractionModel& model) {
  model.validate();
  if (model.zero_temperature())
    throw ValidationError("lindblad_thermal: requires finite beta");
  const ThermalState th = thermal_state(model);
  const int d = model.dim;
  CMat out(d, d), t1(d, d), tmp(d, d);

  // -i [h0, rho]
  CMat::mul_into(model.h0, rho, t1);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      out(r, s) = cplx(0.0, -1.0) * (t1(r, s) - std::conj(t1(s, r)));

  for (int k = 1; k <= model.levels; ++k) {
    const CMat& c = model.couplings[k - 1];
    const CMat cd = c.adjoint();
    const double b0 = th.probs[0], bk = th.probs[k];
    // b0 (C rho C^d - 1/2 {C^d C, rho})
    CMat::mul_into(c, rho, t1);
    sandwich_acc_from(t1, c, b0, out);
    CMat::mul_into(cd, c, tmp);
    CMat::mul_into(tmp, rho, t1);
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s)
        out(r, s) -= 0.5 * b0 * (t1(r, s) + std::conj(t1(s, r)));
    // bk (C^d rho C - 1/2 {C C^d, rho})
    CMat::mul_into(cd, rho, t1);
    sandwich_acc_from(t1, cd, bk, out);
    CMat::mul_into(c, cd, tmp);
    CMat::mul_into(tmp, rho, t1);
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s)
        out(r, s) -= 0.5 * bk * (t1(r, s) + std::conj(t1(s, r)));
  }
  return out;
}

CMat diffusive_h(const CMat& rho, int channel, const ZeroTempCoefficients& co) {
  const auto& ch = co.channels.at(channel);
  if (ch.is_jump)
    throw ValidationError("diffusive_h: channel " + std::to_string(channel) +
                          " is a jump channel");
  CMat t1, out;
  two_sided_noise(ch.noise_op, rho, t1, out);
  return out;
}

CMat diffusive_h_thermal(const CMat& rho, int channel, const ThermalCoefficients& co) {
  const auto& ch = co.channels.at(channel);
  CMat t1, out;
  two_sided_noise(ch.noise_op, rho, t1, out);
  return out;
}

namespace {

// D_i(rho) = sum_{k,l} p_kl L_k rho L_l^dagger; lrho caches L_k rho.
void jump_numerator(const CMat& rho, const ZeroTempCoefficients::Channel& ch,
                    const std::vector<CMat>& limits, std::vector<CMat>& lrho,
                    CMat& out) {
  const int d = rho.rows();
  const int nlev = static_cast<int>(limits.size()) - 1;
  lrho.resize(nlev);
  for (int k = 1; k <= nlev; ++k) {
    lrho[k - 1].resize(d, d);
    CMat::mul_into(limits[k], rho, lrho[k - 1]);
  }
  out.resize(d, d);
  out.set_zero();
  for (int k = 1; k <= nlev; ++k)
    for (int l = 1; l <= nlev; ++l) {
      const cplx p = ch.pkl[(k - 1) * nlev + (l - 1)];
      if (p.real() == 0.0 && p.imag() == 0.0) continue;
      sandwich_acc_from(lrho[k - 1], limits[l], p, out);
    }
}

}  // namespace

double jump_intensity(const CMat& rho, int channel, const ZeroTempCoefficients& co) {
  const auto& ch = co.channels.at(channel);
  if (!ch.is_jump)
    throw ValidationError("jump_intensity: channel " + std::to_string(channel) +
                          " is diffusive");
  std::vector<CMat> lrho;
  CMat d;
  jump_numerator(rho, ch, co.limits, lrho, d);
  return std::max(0.0, d.trace().real());
}

CMat jump_g(const CMat& rho, int channel, const ZeroTempCoefficients& co) {
  const auto& ch = co.channels.at(channel);
  if (!ch.is_jump)
    throw ValidationError("jump_g: channel " + std::to_string(channel) +
                          " is diffusive");
  std::vector<CMat> lrho;
  CMat d;
  jump_numerator(rho, ch, co.limits, lrho, d);
  const double v = d.trace().real();
  if (v <= kIntensityFloor) return CMat(rho.rows(), rho.rows());
  d *= 1.0 / v;
  d -= rho;
  return d;
}

// ---------------------------------------------------------------------------
// Steppers
// ---------------------------------------------------------------------------

ZeroTempSdeStepper::ZeroTempSdeStepper(const ZeroTempCoefficients& co,
                                       const CMat& rho0, double dt,
                                       uint64_t master_seed, uint64_t path_index)
    : co_(&co), dt_(dt), sqrt_dt_(std::sqrt(dt)), rho_(rho0) {
  check_dt(dt);
  if (rho0.rows() != co.dim || rho0.cols() != co.dim)
    throw ValidationError("sde stepper: state dimension mismatch");
  const int d = co.dim;
  out_.resize(d, d);
  coef_.resize(d, d);
  t1_.resize(d, d);
  t2_.resize(d, d);
  for (size_t m = 0; m < co.channels.size(); ++m) {
    noise_rng_.emplace_back(derive_stream_key(master_seed, path_index,
                                              static_cast<uint32_t>(m),
                                              StreamPurpose::Brownian));
    jump_rng_.emplace_back(derive_stream_key(master_seed, path_index,
                                             static_cast<uint32_t>(m),
                                             StreamPurpose::Jump));
  }
}

void ZeroTempSdeStepper::step() {
  const int d = co_->dim;
  // out = rho + drift dt
  CMat::mul_into(co_->limits[0], rho_, t1_);
  coef_.resize(d, d);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) coef_(r, s) = t1_(r, s) + std::conj(t1_(s, r));
  for (int k = 1; k <= co_->levels; ++k) {
    CMat::mul_into(co_->limits[k], rho_, t1_);
    sandwich_acc_from(t1_, co_->limits[k], 1.0, coef_);
  }
  out_ = rho_;
  add_scaled(out_, dt_, coef_);

  for (int m : co_->diffusive_set) {
    const auto& ch = co_->channels[m];
    if (!ch.has_noise) continue;
    two_sided_noise(ch.noise_op, rho_, t1_, coef_);
    add_scaled(out_, noise_rng_[m].next_gaussian() * sqrt_dt_, coef_);
  }

  for (int m : co_->jump_set) {
    const auto& ch = co_->channels[m];
    jump_numerator(rho_, ch, co_->limits, lrho_, coef_);
    const double v = coef_.trace().real();
    if (v <= kIntensityFloor) continue;
    const double vdt = v * dt_;
    if (vdt > kIntensityWarnLevel) intensity_warning_ = true;
    intensity_integral_ += vdt;
    // Compensator -g v dt = -D dt + v rho dt.
    add_scaled(out_, -dt_, coef_);
    add_scaled(out_, vdt, rho_);
    if (jump_rng_[m].next_uniform() <= std::min(vdt, 1.0)) {
      add_scaled(out_, 1.0 / v, coef_);
      add_scaled(out_, -1.0, rho_);
      jumps_.push_back(JumpEvent{t_ + dt_, ch.label});
    }
  }

  trace_drift_ += std::abs(out_.trace().real() - 1.0);
  std::swap(rho_, out_);
  max_repair_ = std::max(max_repair_, project_state_inplace(rho_, wk_));
  t_ += dt_;
  ++steps_;
}

ThermalSdeStepper::ThermalSdeStepper(const ThermalCoefficients& co, const CMat& rho0,
                                     double dt, uint64_t master_seed,
                                     uint64_t path_index)
    : co_(&co), dt_(dt), sqrt_dt_(std::sqrt(dt)), rho_(rho0) {
  check_dt(dt);
  if (rho0.rows() != co.dim || rho0.cols() != co.dim)
    throw ValidationError("sde stepper: state dimension mismatch");
  const int d = co.dim;
  out_.resize(d, d);
  coef_.resize(d, d);
  t1_.resize(d, d);
  t2_.resize(d, d);
  for (size_t m = 0; m < co.channels.size(); ++m)
    noise_rng_.emplace_back(derive_stream_key(master_seed, path_index,
                                              static_cast<uint32_t>(m),
                                              StreamPurpose::Brownian));
}

void ThermalSdeStepper::step() {
  const int d = co_->dim;
  // Drift: -i[h0,rho] - (G rho + rho G) + sum_k (b0 Ck rho Ck^d + bk Ck^d rho Ck).
  CMat::mul_into(co_->h0, rho_, t1_);
  coef_.resize(d, d);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      coef_(r, s) = cplx(0.0, -1.0) * (t1_(r, s) - std::conj(t1_(s, r)));
  CMat::mul_into(co_->dissipator_g, rho_, t1_);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s) coef_(r, s) -= t1_(r, s) + std::conj(t1_(s, r));
  for (int k = 1; k <= co_->levels; ++k) {
    const CMat& c = co_->couplings[k - 1];
    CMat::mul_into(c, rho_, t1_);
    // t2 = C^dagger: sandwich with the adjoint needs C^d rho first; reuse t1.
    sandwich_acc_from(t1_, c, co_->betas[0], coef_);
    t2_.resize(d, d);
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) {
        cplx acc = 0.0;
        for (int cidx = 0; cidx < d; ++cidx)
          acc += std::conj(c(cidx, r)) * rho_(cidx, s);
        t2_(r, s) = acc;
      }
    // t2 = C^dagger rho; out += bk t2 C  i.e. entry (r,s) += bk sum_c t2(r,c) C(c,s)
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) {
        cplx acc = 0.0;
        for (int cidx = 0; cidx < d; ++cidx) acc += t2_(r, cidx) * c(cidx, s);
        coef_(r, s) += co_->betas[k] * acc;
      }
  }
  out_ = rho_;
  add_scaled(out_, dt_, coef_);

  for (size_t m = 0; m < co_->channels.size(); ++m) {
    const auto& ch = co_->channels[m];
    if (!ch.has_noise) continue;
    two_sided_noise(ch.noise_op, rho_, t1_, coef_);
    add_scaled(out_, noise_rng_[m].next_gaussian() * sqrt_dt_, coef_);
  }

  trace_drift_ += std::abs(out_.trace().real() - 1.0);
  std::swap(rho_, out_);
  max_repair_ = std::max(max_repair_, project_state_inplace(rho_, wk_));
  t_ += dt_;
  ++steps_;
}

// ---------------------------------------------------------------------------
// Path drivers
// ---------------------------------------------------------------------------

namespace {

long step_count(double horizon, double dt) {
  if (!(horizon > 0.0)) throw ValidationError("sde: horizon must be positive");
  return static_cast<long>(std::floor(horizon / dt + 1e-9));
}

}  // namespace

ContinuousPath integrate_zero_temp(const DensityMatrix& rho0,
                                   const ZeroTempCoefficients& co, double dt,
                                   double horizon, uint64_t seed) {
  check_dt(dt);
  const long steps = step_count(horizon, dt);
  ContinuousPath path;
  path.seed = seed;
  path.dt = dt;
  path.times.reserve(steps + 1);
  path.states.reserve(steps + 1);
  path.times.push_back(0.0);
  path.states.push_back(rho0);

  ZeroTempSdeStepper w(co, rho0.mat(), dt, seed, 0);
  for (long k = 1; k <= steps; ++k) {
    w.step();
    path.times.push_back(static_cast<double>(k) * dt);
    path.states.push_back(DensityMatrix::unchecked(w.state()));
  }
  path.jump_log = w.jumps();
  path.max_repair = w.max_repair();
  path.trace_drift = w.trace_drift();
  path.intensity_integral = w.intensity_integral();
  path.intensity_warning = w.intensity_warning();
  return path;
}

ContinuousPath integrate_thermal(const DensityMatrix& rho0,
                                 const InteractionModel& model, const Observable& obs,
                                 double dt, double horizon, uint64_t seed) {
  if (model.zero_temperature())
    throw ValidationError("integrate_thermal: requires finite beta");
  if (rho0.dim() != model.dim)
    throw ValidationError("integrate_thermal: state dimension mismatch");
  const ThermalCoefficients co = thermal_coefficients(model, obs);
  check_dt(dt);
  const long steps = step_count(horizon, dt);

  ContinuousPath path;
  path.seed = seed;
  path.dt = dt;
  path.times.reserve(steps + 1);
  path.states.reserve(steps + 1);
  path.times.push_back(0.0);
  path.states.push_back(rho0);

  ThermalSdeStepper w(co, rho0.mat(), dt, seed, 0);
  for (long k = 1; k <= steps; ++k) {
    w.step();
    path.times.push_back(static_cast<double>(k) * dt);
    path.states.push_back(DensityMatrix::unchecked(w.state()));
  }
  path.max_repair = w.max_repair();
  path.trace_drift = w.trace_drift();
  return path;
}

DriftFn make_zero_temp_drift(const InteractionModel& model) {
  auto limits = zero_temp_limit_blocks(model);
  return [limits](const CMat& rho, CMat& out) { out = lindblad_zero(rho, limits); };
}

DriftFn make_thermal_drift(const InteractionModel& model) {
  InteractionModel m = model;
  return [m](const CMat& rho, CMat& out) { out = lindblad_thermal(rho, m); };
}

ContinuousPath solve_master_ode(const DensityMatrix& rho0, const DriftFn& drift,
                                double dt, double horizon) {
  check_dt(dt);
  const long steps = step_count(horizon, dt);
  const int d = rho0.dim();

  ContinuousPath path;
  path.dt = dt;
  path.times.reserve(steps + 1);
  path.states.reserve(steps + 1);
  path.times.push_back(0.0);
  path.states.push_back(rho0);

  CMat rho = rho0.mat();
  CMat k1(d, d), k2(d, d), k3(d, d), k4(d, d), stage(d, d);
  for (long k = 1; k <= steps; ++k) {
    drift(rho, k1);
    stage = rho;
    add_scaled(stage, 0.5 * dt, k1);
    drift(stage, k2);
    stage = rho;
    add_scaled(stage, 0.5 * dt, k2);
    drift(stage, k3);
    stage = rho;
    add_scaled(stage, dt, k3);
    drift(stage, k4);
    add_scaled(rho, dt / 6.0, k1);
    add_scaled(rho, dt / 3.0, k2);
    add_scaled(rho, dt / 3.0, k3);
    add_scaled(rho, dt / 6.0, k4);
    path.times.push_back(static_cast<double>(k) * dt);
    path.states.push_back(DensityMatrix::unchecked(rho));
  }
  return path;
}

}  // namespace qtraj
