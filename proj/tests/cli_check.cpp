// End-to-end check of the qtraj binary: exit codes, output artifacts, and
// byte-stable summaries.  Usage: qtraj_cli_check <qtraj> <presets-dir> <work-dir>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "qtraj/config.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace qtraj;

namespace {

std::string g_bin;
int g_failures = 0;

void expect(bool cond, const std::string& what) {
  std::printf("%s: %s\n", cond ? "ok" : "FAIL", what.c_str());
  if (!cond) ++g_failures;
}

// Exit code of `qtraj <args>`, or -1 when the process died abnormally.
int run_cli(const std::string& args) {
  const std::string cmd = g_bin + " " + args + " > /dev/null";
  const int st = std::system(cmd.c_str());
  if (st == -1 || !WIFEXITED(st)) return -1;
  return WEXITSTATUS(st);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

RunConfig fast_config(bool thermal, bool symmetric, const fs::path& outdir) {
  RunConfig c;
  c.spec.model = oracle::qubit_model(std::log(2.0));
  if (!thermal) c.spec.model.beta = std::numeric_limits<double>::infinity();
  c.spec.obs = symmetric ? symmetric_observable() : diagonal_observable(1);
  c.spec.rho0 = oracle::plus_state();
  c.spec.n = 32;
  c.spec.dt = 5e-3;
  c.spec.horizon = 0.5;
  c.spec.checkpoints = {0.25, 0.5};
  c.spec.functionals = pauli_functionals();
  c.paths = 120;
  c.seed = 9;
  c.n_list = {8, 16};
  c.output.dir = outdir.string();
  c.output.per_path = true;
  c.output.max_path_files = 2;
  return c;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::fprintf(stderr, "usage: qtraj_cli_check <qtraj> <presets-dir> <work-dir>\n");
    return 2;
  }
  g_bin = argv[1];
  const fs::path presets = argv[2];
  const fs::path work = argv[3];
  fs::remove_all(work);
  fs::create_directories(work);

  // Shipped presets parse and describe the four qubit scenarios.
  int zero_count = 0, symmetric_count = 0;
  for (const char* name :
       {"qubit-zero-diagonal", "qubit-zero-symmetric", "qubit-thermal-diagonal",
        "qubit-thermal-symmetric"}) {
    const fs::path p = presets / (std::string(name) + ".json");
    try {
      const RunConfig cfg = load_config(p.string());
      cfg.spec.validate();
      if (cfg.spec.model.zero_temperature()) ++zero_count;
      if (cfg.spec.obs.projectors[0].rows() == 2 &&
          std::abs(cfg.spec.obs.projectors[0](0, 1)) > 0.1)
        ++symmetric_count;
      expect(cfg.spec.model.dim == 2 && cfg.paths >= 1000 && !cfg.n_list.empty(),
             std::string("preset loads: ") + name);
    } catch (const std::exception& e) {
      expect(false, std::string("preset loads: ") + name + " -- " + e.what());
    }
  }
  expect(zero_count == 2 && symmetric_count == 2,
         "presets cover both temperatures and both observables");

  // Fast configs for the CLI runs.
  const fs::path thermal_cfg = work / "thermal.json";
  const fs::path zero_cfg = work / "zero.json";
  const fs::path mismatch_cfg = work / "mismatch.json";
  const fs::path broken_cfg = work / "broken.json";
  write_file(thermal_cfg,
             config_to_json(fast_config(true, true, work / "out-thermal")).dump(2));
  write_file(zero_cfg,
             config_to_json(fast_config(false, false, work / "out-zero")).dump(2));
  {
    json j = config_to_json(fast_config(true, true, work / "out-mismatch"));
    j["engine"]["sde"] = "zero";  // zero-temperature equation on a thermal model
    write_file(mismatch_cfg, j.dump(2));
  }
  write_file(broken_cfg, "{\"schema\": 1, \"model\": ");

  const std::string tc = " --config " + thermal_cfg.string();
  const std::string zc = " --config " + zero_cfg.string();

  expect(run_cli("--help") == 0, "--help exits 0");
  expect(run_cli("") == 2, "missing subcommand exits 2");
  expect(run_cli("simulate-discrete --config " + (work / "nope.json").string()) == 2,
         "missing config file exits 2");
  expect(run_cli("simulate-discrete --config " + broken_cfg.string()) == 2,
         "malformed config exits 2");
  expect(run_cli("simulate-sde --config " + mismatch_cfg.string()) == 2,
         "forcing the zero-temperature equation on a thermal model exits 2");
  expect(run_cli("gns" + zc) == 2, "gns on a zero-temperature model exits 2");

  expect(run_cli("simulate-discrete" + tc) == 0, "simulate-discrete exits 0");
  const fs::path tdir = work / "out-thermal";
  expect(fs::exists(tdir / "summary.json") && fs::exists(tdir / "ensemble.csv"),
         "discrete run writes summary.json and ensemble.csv");
  expect(fs::exists(tdir / "path_00000.csv") && fs::exists(tdir / "path_00001.csv") &&
             !fs::exists(tdir / "path_00002.csv"),
         "per-path output respects max_path_files");

  const std::string first = slurp(tdir / "summary.json");
  expect(run_cli("simulate-discrete" + tc) == 0, "simulate-discrete reruns cleanly");
  expect(!first.empty() && first == slurp(tdir / "summary.json"),
         "rerun reproduces summary.json byte for byte");

  expect(run_cli("simulate-sde" + tc + " --out " + (work / "out-sde").string()) == 0,
         "simulate-sde (thermal) exits 0");
  expect(fs::exists(work / "out-sde" / "summary.json"),
         "sde run writes summary.json");

  expect(run_cli("simulate-sde" + zc) == 0, "simulate-sde (zero temperature) exits 0");
  const fs::path zdir = work / "out-zero";
  expect(fs::exists(zdir / "path_00000.csv") &&
             fs::exists(zdir / "path_00000_jumps.csv"),
         "zero-temperature run writes per-path jump logs");

  expect(run_cli("gns" + tc) == 0, "gns exits 0");
  expect(fs::exists(tdir / "gns.json"), "gns writes gns.json");

  expect(run_cli("converge" + tc) == 0, "converge exits 0");
  expect(fs::exists(tdir / "table.json") && fs::exists(tdir / "table.txt"),
         "converge writes table.json and table.txt");

  expect(run_cli("compare-master" + tc) == 0, "compare-master exits 0");
  expect(fs::exists(tdir / "report.json") && fs::exists(tdir / "report.txt"),
         "compare-master writes report.json and report.txt");

  if (g_failures == 0) {
    std::printf("cli: all checks passed\n");
    return 0;
  }
  std::printf("cli: %d check(s) failed\n", g_failures);
  return 1;
}
