#include "qtraj/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>

namespace qtraj {
namespace {

void parallel_for(long total, int threads, const std::function<void(long)>& fn) {
  if (threads <= 1 || total < 2) {
    for (long i = 0; i < total; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= total) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = static_cast<int>(std::min<long>(threads, total));
  pool.reserve(k);
  for (int i = 0; i < k; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct Moments {
  double mean = 0.0, var = 0.0, se_mean = 0.0, se_var = 0.0;
};

// Two-pass sample moments in index order, so the result does not depend on
// how paths were scheduled.
Moments moments(const double* x, long m) {
  Moments mo;
  double s = 0.0;
  for (long i = 0; i < m; ++i) s += x[i];
  mo.mean = s / static_cast<double>(m);
  double s2 = 0.0, s4 = 0.0;
  for (long i = 0; i < m; ++i) {
    const double d = x[i] - mo.mean;
    const double d2 = d * d;
    s2 += d2;
    s4 += d2 * d2;
  }
  if (m > 1) {
    mo.var = s2 / static_cast<double>(m - 1);
    mo.se_mean = std::sqrt(mo.var / static_cast<double>(m));
    const double m4 = s4 / static_cast<double>(m);
    const double vv =
        (m4 - mo.var * mo.var * static_cast<double>(m - 3) / static_cast<double>(m - 1)) /
        static_cast<double>(m);
    mo.se_var = std::sqrt(std::max(0.0, vv));
  }
  return mo;
}

}  // namespace

std::vector<Functional> pauli_functionals() {
  return {{"sx", pauli_x()}, {"sy", pauli_y()}, {"sz", pauli_z()}};
}

void RunSpec::validate() const {
  model.validate();
  obs.validate(model.bath_dim());
  const DensityMatrix checked(rho0);  // throws with details on a bad state
  (void)checked;
  if (rho0.rows() != model.dim)
    throw ValidationError("spec.rho0: dimension does not match the model");
  if (n < 1) throw ValidationError("spec.n: must be >= 1");
  if (!(dt > 0.0) || dt > 1e-2)
    throw ValidationError("spec.dt: must lie in (0, 1e-2]");
  if (!(horizon > 0.0)) throw ValidationError("spec.horizon: must be positive");
  if (checkpoints.empty()) throw ValidationError("spec.checkpoints: none given");
  double prev = 0.0;
  for (double t : checkpoints) {
    if (!(t > prev))
      throw ValidationError("spec.checkpoints: must be strictly increasing and positive");
    if (t > horizon + 1e-9)
      throw ValidationError("spec.checkpoints: beyond the horizon");
    prev = t;
  }
  if (functionals.empty()) throw ValidationError("spec.functionals: none given");
  for (const auto& f : functionals)
    if (f.op.rows() != model.dim || f.op.cols() != model.dim)
      throw ValidationError("spec.functionals: operator shape mismatch for " + f.name);
}

EnsembleSummary ensemble_run(Engine engine, const RunSpec& spec, long paths,
                             uint64_t seed, int threads) {
  spec.validate();
  if (paths < 100) throw ValidationError("ensemble: needs at least 100 paths");

  const int nckpt = static_cast<int>(spec.checkpoints.size());
  const int nfn = static_cast<int>(spec.functionals.size());
  const int d = spec.model.dim;

  // Step index of each checkpoint.
  std::vector<long> stop(nckpt);
  for (int c = 0; c < nckpt; ++c) {
    const double t = spec.checkpoints[c];
    stop[c] = engine == Engine::Discrete
                  ? static_cast<long>(std::floor(t * static_cast<double>(spec.n) + 1e-9))
                  : static_cast<long>(std::floor(t / spec.dt + 1e-9));
  }

  // Shared per-engine machinery, built once.
  const bool zero_temp = spec.model.zero_temperature();
  std::unique_ptr<KrausFamily> fam;
  std::unique_ptr<ZeroTempCoefficients> zco;
  std::unique_ptr<ThermalCoefficients> tco;
  if (engine == Engine::Discrete) {
    fam = std::make_unique<KrausFamily>(spec.model, spec.obs, spec.n);
  } else if (zero_temp) {
    zco = std::make_unique<ZeroTempCoefficients>(zero_temp_coefficients(spec.model, spec.obs));
  } else {
    tco = std::make_unique<ThermalCoefficients>(thermal_coefficients(spec.model, spec.obs));
  }

  // Per-path slots, reduced in index order afterwards.
  std::vector<double> values(static_cast<size_t>(paths) * nckpt * nfn);
  std::vector<CMat> states(static_cast<size_t>(paths) * nckpt);
  std::vector<double> jump_counts, intensities;
  const bool jump_stats = engine == Engine::Continuous && zero_temp;
  if (jump_stats) {
    jump_counts.assign(paths, 0.0);
    intensities.assign(paths, 0.0);
  }
  std::vector<double> repairs(paths, 0.0), drifts(paths, 0.0);
  std::atomic<bool> warned{false};

  auto record = [&](long path, int c, const CMat& rho) {
    states[static_cast<size_t>(path) * nckpt + c] = rho;
    for (int f = 0; f < nfn; ++f)
      values[(static_cast<size_t>(path) * nckpt + c) * nfn + f] =
          real_expectation(rho, spec.functionals[f].op);
  };

  parallel_for(paths, threads, [&](long path) {
    if (engine == Engine::Discrete) {
      DiscreteStepper w(*fam, spec.rho0,
                        derive_stream_key(seed, path, 0, StreamPurpose::Outcome));
      for (int c = 0; c < nckpt; ++c) {
        while (w.steps_done() < stop[c]) w.step();
        record(path, c, w.state());
      }
      repairs[path] = w.max_repair();
    } else if (zero_temp) {
      ZeroTempSdeStepper w(*zco, spec.rho0, spec.dt, seed, path);
      for (int c = 0; c < nckpt; ++c) {
        while (w.steps_done() < stop[c]) w.step();
        record(path, c, w.state());
      }
      jump_counts[path] = static_cast<double>(w.jumps().size());
      intensities[path] = w.intensity_integral();
      repairs[path] = w.max_repair();
      drifts[path] = w.trace_drift();
      if (w.intensity_warning()) warned = true;
    } else {
      ThermalSdeStepper w(*tco, spec.rho0, spec.dt, seed, path);
      for (int c = 0; c < nckpt; ++c) {
        while (w.steps_done() < stop[c]) w.step();
        record(path, c, w.state());
      }
      repairs[path] = w.max_repair();
      drifts[path] = w.trace_drift();
    }
  });

  EnsembleSummary out;
  out.engine = engine;
  out.paths = paths;
  out.seed = seed;
  out.n = spec.n;
  out.dt = spec.dt;
  out.times = spec.checkpoints;
  for (const auto& f : spec.functionals) out.functional_names.push_back(f.name);
  out.mean.assign(nckpt, std::vector<double>(nfn, 0.0));
  out.var = out.se_mean = out.se_var = out.mean;
  out.mean_states.assign(nckpt, CMat(d, d));

  std::vector<double> column(paths);
  for (int c = 0; c < nckpt; ++c) {
    for (long p = 0; p < paths; ++p)
      add_scaled(out.mean_states[c], 1.0 / static_cast<double>(paths),
                 states[static_cast<size_t>(p) * nckpt + c]);
    for (int f = 0; f < nfn; ++f) {
      for (long p = 0; p < paths; ++p)
        column[p] = values[(static_cast<size_t>(p) * nckpt + c) * nfn + f];
      const Moments mo = moments(column.data(), paths);
      out.mean[c][f] = mo.mean;
      out.var[c][f] = mo.var;
      out.se_mean[c][f] = mo.se_mean;
      out.se_var[c][f] = mo.se_var;
    }
  }
  for (long p = 0; p < paths; ++p) {
    out.max_repair = std::max(out.max_repair, repairs[p]);
    out.trace_drift = std::max(out.trace_drift, drifts[p]);
  }
  if (jump_stats) {
    out.has_jump_stats = true;
    const Moments mc = moments(jump_counts.data(), paths);
    const Moments mi = moments(intensities.data(), paths);
    out.jump_count_mean = mc.mean;
    out.jump_count_se = mc.se_mean;
    out.intensity_mean = mi.mean;
    out.intensity_se = mi.se_mean;
    for (long p = 0; p < paths; ++p) column[p] = jump_counts[p] - intensities[p];
    const Moments md = moments(column.data(), paths);
    out.paired_diff_mean = md.mean;
    out.paired_diff_se = md.se_mean;
  }
  out.intensity_warning = warned.load();
  return out;
}

namespace {

const CMat& ode_state_at(const ContinuousPath& ode, double t) {
  const long idx = static_cast<long>(std::floor(t / ode.dt + 1e-9));
  if (idx < 0 || idx >= static_cast<long>(ode.states.size()) ||
      std::abs(ode.times[idx] - t) > 1e-6)
    throw ValidationError("mean_vs_master: checkpoint not on the reference grid");
  return ode.states[idx].mat();
}

}  // namespace

MeanMasterReport mean_vs_master(const EnsembleSummary& summary,
                                const ContinuousPath& ode,
                                const std::vector<Functional>& fns, double atol) {
  if (fns.size() != summary.functional_names.size())
    throw ValidationError("mean_vs_master: functional list mismatch");
  MeanMasterReport rep;
  rep.atol = atol;
  rep.pass = true;
  for (size_t c = 0; c < summary.times.size(); ++c) {
    const CMat& ref = ode_state_at(ode, summary.times[c]);
    for (size_t f = 0; f < fns.size(); ++f) {
      MeanMasterRow row;
      row.time = summary.times[c];
      row.functional = fns[f].name;
      row.ensemble_mean = summary.mean[c][f];
      row.se = summary.se_mean[c][f];
      row.ode_value = real_expectation(ref, fns[f].op);
      row.deviation = row.ensemble_mean - row.ode_value;
      row.z = std::abs(row.deviation) / std::max(row.se, 1e-300);
      row.pass = std::abs(row.deviation) <= 3.0 * row.se + atol;
      rep.pass = rep.pass && row.pass;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

std::string MeanMasterReport::render() const {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%6s %-6s %12s %12s %12s %10s %6s\n", "t",
                "fn", "ensemble", "reference", "deviation", "3se+atol", "ok");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%6.3f %-6s %12.6f %12.6f %12.3e %10.3e %6s\n",
                  r.time, r.functional.c_str(), r.ensemble_mean, r.ode_value,
                  r.deviation, 3.0 * r.se + atol, r.pass ? "yes" : "NO");
    out += line;
  }
  out += pass ? "overall: pass\n" : "overall: FAIL\n";
  return out;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("log_log_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable convergence_table(const RunSpec& spec, const std::vector<long>& ns,
                                   long paths, uint64_t seed, int threads,
                                   const EnsembleSummary& reference) {
  if (ns.empty()) throw ValidationError("convergence_table: empty resolution list");
  const int nfn = static_cast<int>(spec.functionals.size());
  const int last = static_cast<int>(spec.checkpoints.size()) - 1;

  ConvergenceTable tab;
  tab.ns = ns;
  for (const auto& f : spec.functionals) tab.fn_names.push_back(f.name);

  for (long n : ns) {
    RunSpec s = spec;
    s.n = n;
    const uint64_t sub = derive_stream_key(seed, static_cast<uint64_t>(n), 0,
                                           StreamPurpose::Misc);
    const EnsembleSummary sum = ensemble_run(Engine::Discrete, s, paths, sub, threads);
    std::vector<double> me(nfn), ms(nfn), ve(nfn), vs(nfn);
    for (int f = 0; f < nfn; ++f) {
      me[f] = std::abs(sum.mean[last][f] - reference.mean[last][f]);
      ms[f] = std::sqrt(sum.se_mean[last][f] * sum.se_mean[last][f] +
                        reference.se_mean[last][f] * reference.se_mean[last][f]);
      ve[f] = std::abs(sum.var[last][f] - reference.var[last][f]);
      vs[f] = std::sqrt(sum.se_var[last][f] * sum.se_var[last][f] +
                        reference.se_var[last][f] * reference.se_var[last][f]);
    }
    tab.mean_err.push_back(std::move(me));
    tab.mean_se.push_back(std::move(ms));
    tab.var_err.push_back(std::move(ve));
    tab.var_se.push_back(std::move(vs));
  }

  std::vector<double> xs(ns.begin(), ns.end());
  for (int f = 0; f < nfn; ++f) {
    std::vector<double> ys;
    for (size_t i = 0; i < ns.size(); ++i) ys.push_back(tab.mean_err[i][f]);
    tab.slope.push_back(log_log_slope(xs, ys));
  }
  return tab;
}

std::string ConvergenceTable::render() const {
  std::string out;
  char line[256];
  for (size_t f = 0; f < fn_names.size(); ++f) {
    std::snprintf(line, sizeof(line), "functional %s (slope %.3f)\n",
                  fn_names[f].c_str(), slope[f]);
    out += line;
    std::snprintf(line, sizeof(line), "  %8s %12s %12s %12s %12s\n", "n",
                  "|dmean|", "se", "|dvar|", "se");
    out += line;
    for (size_t i = 0; i < ns.size(); ++i) {
      std::snprintf(line, sizeof(line), "  %8ld %12.3e %12.3e %12.3e %12.3e\n",
                    ns[i], mean_err[i][f], mean_se[i][f], var_err[i][f],
                    var_se[i][f]);
      out += line;
    }
  }
  return out;
}

}  // namespace qtraj
