#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "qtraj/io.hpp"

namespace qtraj {
namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
};

RunConfig load_with_overrides(const CliArgs& args) {
  RunConfig cfg = load_config(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  if (!args.out_dir.empty()) cfg.output.dir = args.out_dir;
  return cfg;
}

json manifest(const char* command, const RunConfig& cfg) {
  json j;
  j["schema"] = 1;
  j["command"] = command;
  const json echo = config_to_json(cfg);
  j["config_hash"] = hash_hex(config_hash(echo));
  j["config"] = echo;
  return j;
}

Engine continuous_engine_check(const RunConfig& cfg) {
  const bool zero = cfg.spec.model.zero_temperature();
  if (cfg.sde_kind == SdeKind::Thermal && zero)
    throw ValidationError(
        "engine.sde: thermal engine requested for a zero-temperature model");
  if (cfg.sde_kind == SdeKind::Zero && !zero)
    throw ValidationError(
        "engine.sde: zero-temperature engine requested for a finite-beta model");
  return Engine::Continuous;
}

void write_discrete_paths(const RunConfig& cfg, int threads) {
  (void)threads;
  const KrausFamily fam(cfg.spec.model, cfg.spec.obs, cfg.spec.n);
  const long steps = static_cast<long>(cfg.spec.horizon * static_cast<double>(cfg.spec.n) + 1e-9);
  const long count = std::min<long>(cfg.paths, cfg.output.max_path_files);
  for (long p = 0; p < count; ++p) {
    DiscretePath path;
    path.seed = cfg.seed;
    path.n = cfg.spec.n;
    path.times.push_back(0.0);
    path.states.push_back(DensityMatrix::unchecked(cfg.spec.rho0));
    DiscreteStepper w(fam, cfg.spec.rho0,
                      derive_stream_key(cfg.seed, p, 0, StreamPurpose::Outcome));
    for (long k = 1; k <= steps; ++k) {
      path.outcomes.push_back(w.step());
      path.times.push_back(static_cast<double>(k) / static_cast<double>(cfg.spec.n));
      path.states.push_back(DensityMatrix::unchecked(w.state()));
    }
    char name[64];
    std::snprintf(name, sizeof(name), "/path_%05ld.csv", p);
    write_text(cfg.output.dir + name, discrete_path_csv(path, cfg.spec.functionals));
  }
}

void write_continuous_paths(const RunConfig& cfg) {
  const bool zero = cfg.spec.model.zero_temperature();
  const long count = std::min<long>(cfg.paths, cfg.output.max_path_files);
  std::unique_ptr<ZeroTempCoefficients> zco;
  std::unique_ptr<ThermalCoefficients> tco;
  if (zero)
    zco = std::make_unique<ZeroTempCoefficients>(
        zero_temp_coefficients(cfg.spec.model, cfg.spec.obs));
  else
    tco = std::make_unique<ThermalCoefficients>(
        thermal_coefficients(cfg.spec.model, cfg.spec.obs));
  const long steps = static_cast<long>(cfg.spec.horizon / cfg.spec.dt + 1e-9);
  for (long p = 0; p < count; ++p) {
    ContinuousPath path;
    path.seed = cfg.seed;
    path.dt = cfg.spec.dt;
    path.times.push_back(0.0);
    path.states.push_back(DensityMatrix::unchecked(cfg.spec.rho0));
    if (zero) {
      ZeroTempSdeStepper w(*zco, cfg.spec.rho0, cfg.spec.dt, cfg.seed, p);
      for (long k = 1; k <= steps; ++k) {
        w.step();
        path.times.push_back(static_cast<double>(k) * cfg.spec.dt);
        path.states.push_back(DensityMatrix::unchecked(w.state()));
      }
      path.jump_log = w.jumps();
    } else {
      ThermalSdeStepper w(*tco, cfg.spec.rho0, cfg.spec.dt, cfg.seed, p);
      for (long k = 1; k <= steps; ++k) {
        w.step();
        path.times.push_back(static_cast<double>(k) * cfg.spec.dt);
        path.states.push_back(DensityMatrix::unchecked(w.state()));
      }
    }
    char name[64];
    std::snprintf(name, sizeof(name), "/path_%05ld.csv", p);
    write_text(cfg.output.dir + name, continuous_path_csv(path, cfg.spec.functionals));
    if (zero) {
      std::snprintf(name, sizeof(name), "/path_%05ld_jumps.csv", p);
      write_text(cfg.output.dir + name, jumps_csv(path));
    }
  }
}

void print_summary(const EnsembleSummary& s) {
  std::printf("%8s", "t");
  for (const auto& f : s.functional_names) std::printf("  %10s  %10s", f.c_str(), "se");
  std::printf("\n");
  for (size_t c = 0; c < s.times.size(); ++c) {
    std::printf("%8.3f", s.times[c]);
    for (size_t f = 0; f < s.functional_names.size(); ++f)
      std::printf("  %10.6f  %10.2e", s.mean[c][f], s.se_mean[c][f]);
    std::printf("\n");
  }
  if (s.has_jump_stats)
    std::printf("jumps: mean %.4f (se %.4f), integrated intensity %.4f (se %.4f)\n",
                s.jump_count_mean, s.jump_count_se, s.intensity_mean, s.intensity_se);
  if (s.intensity_warning)
    std::fprintf(stderr,
                 "warning: jump intensity times dt exceeded 0.1; decrease dt\n");
}

int cmd_simulate(const CliArgs& args, bool discrete) {
  RunConfig cfg = load_with_overrides(args);
  const Engine engine = discrete ? Engine::Discrete : continuous_engine_check(cfg);
  const EnsembleSummary summary =
      ensemble_run(engine, cfg.spec, cfg.paths, cfg.seed, args.threads);
  ensure_dir(cfg.output.dir);
  json j = manifest(discrete ? "simulate-discrete" : "simulate-sde", cfg);
  j["summary"] = summary_to_json(summary);
  write_text(cfg.output.dir + "/summary.json", j.dump(2) + "\n");
  write_text(cfg.output.dir + "/ensemble.csv", ensemble_csv(summary));
  if (cfg.output.per_path) {
    if (discrete)
      write_discrete_paths(cfg, args.threads);
    else
      write_continuous_paths(cfg);
  }
  print_summary(summary);
  std::printf("wrote %s/summary.json\n", cfg.output.dir.c_str());
  return 0;
}

int cmd_gns(const CliArgs& args) {
  RunConfig cfg = load_with_overrides(args);
  const InteractionModel& model = cfg.spec.model;
  if (model.zero_temperature())
    throw ValidationError("gns: requires a finite-temperature model");
  const ThermalState th = thermal_state(model);
  const GnsBasis basis(th);
  const int m = model.bath_dim();

  json j = manifest("gns", cfg);
  j["thermal_probs"] = th.probs;
  json jb;
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k)
      jb["X_" + std::to_string(i) + "_" + std::to_string(k)] =
          matrix_to_json(basis.element(i, k));
  j["basis"] = jb;

  const ThermalLimitBlocks blocks = thermal_limit_blocks(model);
  json jl;
  jl["to_00"] = matrix_to_json(blocks.to_00);
  json k0 = json::array(), l0 = json::array();
  for (const auto& b : blocks.to_k0) k0.push_back(matrix_to_json(b));
  for (const auto& b : blocks.to_0l) l0.push_back(matrix_to_json(b));
  jl["to_k0"] = k0;
  jl["to_0l"] = l0;
  j["limit_blocks"] = jl;

  json jp = json::array();
  for (int o = 0; o < cfg.spec.obs.num_outcomes(); ++o) {
    const TransportedProjector tp =
        transport_projector(cfg.spec.obs.projectors[o], basis, th);
    json row;
    row["outcome"] = o;
    row["p_0000"] = tp.at(0, 0, 0, 0).real();
    json pk0 = json::array(), p0k = json::array();
    for (int k = 1; k < m; ++k) {
      pk0.push_back(json::array({tp.at(0, 0, k, 0).real(), tp.at(0, 0, k, 0).imag()}));
      p0k.push_back(json::array({tp.at(0, 0, 0, k).real(), tp.at(0, 0, 0, k).imag()}));
    }
    row["p_k0"] = pk0;
    row["p_0k"] = p0k;
    jp.push_back(row);
  }
  j["projector_coefficients"] = jp;

  // Residuals of the transported interaction blocks against their limits.
  json sweep = json::array();
  std::vector<double> ns, r00s;
  const CMat id_d = CMat::identity(model.dim);
  for (long n = 256; n <= 16384; n *= 4) {
    const CMat u = build_unitary(model, n);
    const TransportedOperator tu = transport_operator(u, basis, th, model.dim);
    CMat d00 = tu.at(0, 0, 0, 0);
    d00 -= id_d;
    d00 *= static_cast<double>(n);
    d00 -= blocks.to_00;
    double rk0 = 0.0, r0l = 0.0;
    const double sq = std::sqrt(static_cast<double>(n));
    for (int k = 1; k < m; ++k) {
      CMat dk = tu.at(0, 0, k, 0);
      dk *= sq;
      dk -= blocks.to_k0[k - 1];
      rk0 = std::max(rk0, dk.max_abs());
      CMat dl = tu.at(0, 0, 0, k);
      dl *= sq;
      dl -= blocks.to_0l[k - 1];
      r0l = std::max(r0l, dl.max_abs());
    }
    json row;
    row["n"] = n;
    row["res_00"] = d00.max_abs();
    row["res_k0"] = rk0;
    row["res_0l"] = r0l;
    sweep.push_back(row);
    ns.push_back(static_cast<double>(n));
    r00s.push_back(d00.max_abs());
    std::printf("n %6ld  res00 %10.3e  resk0 %10.3e  res0l %10.3e\n", n,
                d00.max_abs(), rk0, r0l);
  }
  j["block_residuals"] = sweep;
  j["res_00_slope"] = log_log_slope(ns, r00s);
  std::printf("res00 slope %.3f\n", j["res_00_slope"].get<double>());

  ensure_dir(cfg.output.dir);
  write_text(cfg.output.dir + "/gns.json", j.dump(2) + "\n");
  std::printf("wrote %s/gns.json\n", cfg.output.dir.c_str());
  return 0;
}

int cmd_converge(const CliArgs& args) {
  RunConfig cfg = load_with_overrides(args);
  if (cfg.n_list.empty())
    throw ValidationError("engine.n_list: required for the converge command");
  continuous_engine_check(cfg);
  const EnsembleSummary reference =
      ensemble_run(Engine::Continuous, cfg.spec, cfg.paths, cfg.seed, args.threads);
  const ConvergenceTable tab = convergence_table(cfg.spec, cfg.n_list, cfg.paths,
                                                 cfg.seed, args.threads, reference);
  const std::string text = tab.render();
  std::printf("%s", text.c_str());

  json j = manifest("converge", cfg);
  json rows = json::array();
  for (size_t i = 0; i < tab.ns.size(); ++i) {
    json row;
    row["n"] = tab.ns[i];
    for (size_t f = 0; f < tab.fn_names.size(); ++f) {
      json e;
      e["mean_err"] = tab.mean_err[i][f];
      e["mean_se"] = tab.mean_se[i][f];
      e["var_err"] = tab.var_err[i][f];
      e["var_se"] = tab.var_se[i][f];
      row[tab.fn_names[f]] = e;
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  json slopes;
  for (size_t f = 0; f < tab.fn_names.size(); ++f) slopes[tab.fn_names[f]] = tab.slope[f];
  j["slopes"] = slopes;
  ensure_dir(cfg.output.dir);
  write_text(cfg.output.dir + "/table.json", j.dump(2) + "\n");
  write_text(cfg.output.dir + "/table.txt", text);
  std::printf("wrote %s/table.json\n", cfg.output.dir.c_str());
  return 0;
}

int cmd_compare_master(const CliArgs& args) {
  RunConfig cfg = load_with_overrides(args);
  const Engine engine = cfg.compare_engine == Engine::Continuous
                            ? continuous_engine_check(cfg)
                            : Engine::Discrete;
  const EnsembleSummary summary =
      ensemble_run(engine, cfg.spec, cfg.paths, cfg.seed, args.threads);
  const DriftFn drift = cfg.spec.model.zero_temperature()
                            ? make_zero_temp_drift(cfg.spec.model)
                            : make_thermal_drift(cfg.spec.model);
  const ContinuousPath ode = solve_master_ode(DensityMatrix(cfg.spec.rho0), drift,
                                              cfg.spec.dt, cfg.spec.horizon);
  const double scheme_step = engine == Engine::Discrete
                                 ? 1.0 / static_cast<double>(cfg.spec.n)
                                 : cfg.spec.dt;
  const MeanMasterReport rep =
      mean_vs_master(summary, ode, cfg.spec.functionals, kMeanTolPerDt * scheme_step);
  const std::string text = rep.render();
  std::printf("%s", text.c_str());

  json j = manifest("compare-master", cfg);
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row;
    row["time"] = r.time;
    row["functional"] = r.functional;
    row["ensemble_mean"] = r.ensemble_mean;
    row["se"] = r.se;
    row["reference"] = r.ode_value;
    row["deviation"] = r.deviation;
    row["z"] = r.z;
    row["pass"] = r.pass;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["atol"] = rep.atol;
  j["pass"] = rep.pass;
  ensure_dir(cfg.output.dir);
  write_text(cfg.output.dir + "/report.json", j.dump(2) + "\n");
  write_text(cfg.output.dir + "/report.txt", text);
  std::printf("wrote %s/report.json\n", cfg.output.dir.c_str());
  return 0;
}

}  // namespace
}  // namespace qtraj

int main(int argc, char** argv) {
  CLI::App app{"Repeated-interaction quantum trajectory simulator"};
  app.require_subcommand(1);

  qtraj::CliArgs args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "JSON run configuration")
        ->required();
    sub->add_option("--seed", args.seed, "override the config seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    sub->add_option("--threads", args.threads, "worker thread count");
    sub->add_option("--out", args.out_dir, "override the output directory");
  };

  CLI::App* sim_d = app.add_subcommand("simulate-discrete",
                                       "run the measured interaction chain");
  CLI::App* sim_s = app.add_subcommand("simulate-sde",
                                       "run the limiting stochastic equation");
  CLI::App* gns = app.add_subcommand("gns",
                                     "dump the thermal basis, transported "
                                     "coefficients and block residuals");
  CLI::App* conv = app.add_subcommand("converge",
                                      "sweep n against the continuous reference");
  CLI::App* comp = app.add_subcommand("compare-master",
                                      "ensemble mean against the master equation");
  for (CLI::App* sub : {sim_d, sim_s, gns, conv, comp}) add_common(sub);

  try {
    app.parse(argc, argv);
    if (app.got_subcommand(sim_d)) return qtraj::cmd_simulate(args, true);
    if (app.got_subcommand(sim_s)) return qtraj::cmd_simulate(args, false);
    if (app.got_subcommand(gns)) return qtraj::cmd_gns(args);
    if (app.got_subcommand(conv)) return qtraj::cmd_converge(args);
    if (app.got_subcommand(comp)) return qtraj::cmd_compare_master(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const qtraj::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const qtraj::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
