#include "qtraj/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace qtraj {
namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError(where + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) fail(where + "." + key, "missing");
  return *it;
}

double need_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

long need_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long>();
}

cplx complex_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(where, "expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json complex_to_json(cplx v) { return json::array({v.real(), v.imag()}); }

Observable observable_from_json(const json& j, int bath_dim, const std::string& where) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "diagonal") return diagonal_observable(bath_dim - 1);
    if (name == "symmetric") {
      if (bath_dim != 2) fail(where, "symmetric preset needs a two-level bath");
      return symmetric_observable();
    }
    if (name == "trivial") return trivial_observable(bath_dim);
    fail(where, "unknown preset \"" + name + "\"");
  }
  if (!j.is_object()) fail(where, "expected a preset name or an object");
  Observable obs;
  const json& ev = need(j, "eigenvalues", where);
  if (!ev.is_array()) fail(where + ".eigenvalues", "expected an array");
  for (const auto& v : ev) obs.eigenvalues.push_back(need_number(v, where + ".eigenvalues"));
  const json& pr = need(j, "projectors", where);
  if (!pr.is_array()) fail(where + ".projectors", "expected an array");
  for (size_t i = 0; i < pr.size(); ++i)
    obs.projectors.push_back(
        matrix_from_json(pr[i], where + ".projectors[" + std::to_string(i) + "]"));
  return obs;
}

json observable_to_json(const Observable& obs) {
  json j;
  j["eigenvalues"] = obs.eigenvalues;
  json pr = json::array();
  for (const auto& p : obs.projectors) pr.push_back(matrix_to_json(p));
  j["projectors"] = pr;
  return j;
}

}  // namespace

CMat matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nested array matrix");
  const int rows = static_cast<int>(j.size());
  if (!j[0].is_array()) fail(where + "[0]", "expected a row array");
  const int cols = static_cast<int>(j[0].size());
  CMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      fail(rw, "expected " + std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(row[c], rw + "[" + std::to_string(c) + "]");
  }
  return m;
}

json matrix_to_json(const CMat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) fail("config", "expected a JSON object");
  if (need(j, "schema", "config").get<long>() != 1)
    fail("config.schema", "unsupported schema version");

  RunConfig cfg;
  const json& jm = need(j, "model", "config");
  InteractionModel& model = cfg.spec.model;
  model.dim = static_cast<int>(need_integer(need(jm, "dim", "model"), "model.dim"));
  model.levels = static_cast<int>(need_integer(need(jm, "levels", "model"), "model.levels"));
  model.h0 = matrix_from_json(need(jm, "h0", "model"), "model.h0");
  const json& jc = need(jm, "couplings", "model");
  if (!jc.is_array()) fail("model.couplings", "expected an array");
  for (size_t i = 0; i < jc.size(); ++i)
    model.couplings.push_back(
        matrix_from_json(jc[i], "model.couplings[" + std::to_string(i) + "]"));
  const json& jg = need(jm, "gammas", "model");
  if (!jg.is_array()) fail("model.gammas", "expected an array");
  for (const auto& g : jg) model.gammas.push_back(need_number(g, "model.gammas"));
  const json& jb = need(jm, "beta", "model");
  if (jb.is_string()) {
    if (jb.get<std::string>() != "inf") fail("model.beta", "expected a number or \"inf\"");
    model.beta = std::numeric_limits<double>::infinity();
  } else {
    model.beta = need_number(jb, "model.beta");
  }
  model.validate();

  cfg.spec.obs = observable_from_json(need(j, "observable", "config"),
                                      model.bath_dim(), "observable");
  cfg.spec.obs.validate(model.bath_dim());

  cfg.spec.rho0 = matrix_from_json(need(j, "rho0", "config"), "rho0");
  try {
    const DensityMatrix checked(cfg.spec.rho0);
    (void)checked;
  } catch (const ValidationError& e) {
    fail("rho0", e.what());
  }

  const json& je = need(j, "engine", "config");
  cfg.spec.n = need_integer(need(je, "n", "engine"), "engine.n");
  if (cfg.spec.n < 1) fail("engine.n", "must be >= 1");
  cfg.spec.dt = need_number(need(je, "dt", "engine"), "engine.dt");
  cfg.spec.horizon = need_number(need(je, "horizon", "engine"), "engine.horizon");
  cfg.paths = need_integer(need(je, "paths", "engine"), "engine.paths");
  const json& js = need(je, "seed", "engine");
  if (!js.is_number_unsigned() && !js.is_number_integer())
    fail("engine.seed", "expected an integer");
  cfg.seed = js.get<uint64_t>();
  const json& jk = need(je, "checkpoints", "engine");
  if (!jk.is_array() || jk.empty()) fail("engine.checkpoints", "expected a nonempty array");
  for (const auto& t : jk)
    cfg.spec.checkpoints.push_back(need_number(t, "engine.checkpoints"));
  if (je.contains("sde")) {
    const std::string kind = je["sde"].get<std::string>();
    if (kind == "auto")
      cfg.sde_kind = SdeKind::Auto;
    else if (kind == "thermal")
      cfg.sde_kind = SdeKind::Thermal;
    else if (kind == "zero")
      cfg.sde_kind = SdeKind::Zero;
    else
      fail("engine.sde", "expected auto, thermal or zero");
  }
  if (je.contains("compare")) {
    const std::string kind = je["compare"].get<std::string>();
    if (kind == "discrete")
      cfg.compare_engine = Engine::Discrete;
    else if (kind == "continuous")
      cfg.compare_engine = Engine::Continuous;
    else
      fail("engine.compare", "expected discrete or continuous");
  }
  if (je.contains("n_list")) {
    if (!je["n_list"].is_array()) fail("engine.n_list", "expected an array");
    for (const auto& v : je["n_list"])
      cfg.n_list.push_back(need_integer(v, "engine.n_list"));
  }

  if (j.contains("functionals")) {
    const json& jf = j["functionals"];
    if (jf.is_string()) {
      if (jf.get<std::string>() != "pauli")
        fail("functionals", "unknown preset \"" + jf.get<std::string>() + "\"");
      if (model.dim != 2) fail("functionals", "pauli preset needs dim 2");
      cfg.spec.functionals = pauli_functionals();
    } else if (jf.is_array()) {
      for (size_t i = 0; i < jf.size(); ++i) {
        const std::string where = "functionals[" + std::to_string(i) + "]";
        Functional f;
        f.name = need(jf[i], "name", where).get<std::string>();
        f.op = matrix_from_json(need(jf[i], "matrix", where), where + ".matrix");
        if (f.op.herm_defect() > 1e-10) fail(where + ".matrix", "not Hermitian");
        cfg.spec.functionals.push_back(std::move(f));
      }
    } else {
      fail("functionals", "expected \"pauli\" or an array");
    }
  } else if (model.dim == 2) {
    cfg.spec.functionals = pauli_functionals();
  } else {
    fail("functionals", "required when dim != 2");
  }

  if (j.contains("output")) {
    const json& jo = j["output"];
    if (jo.contains("dir")) cfg.output.dir = jo["dir"].get<std::string>();
    if (jo.contains("per_path")) cfg.output.per_path = jo["per_path"].get<bool>();
    if (jo.contains("max_path_files"))
      cfg.output.max_path_files =
          static_cast<int>(need_integer(jo["max_path_files"], "output.max_path_files"));
  }

  try {
    cfg.spec.validate();
  } catch (const ValidationError& e) {
    fail("config", e.what());
  }
  if (cfg.paths < 100) fail("engine.paths", "must be >= 100");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("config: " + std::string(e.what()));
  }
  return parse_config(j);
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["schema"] = 1;
  json jm;
  jm["dim"] = cfg.spec.model.dim;
  jm["levels"] = cfg.spec.model.levels;
  jm["h0"] = matrix_to_json(cfg.spec.model.h0);
  json jc = json::array();
  for (const auto& c : cfg.spec.model.couplings) jc.push_back(matrix_to_json(c));
  jm["couplings"] = jc;
  jm["gammas"] = cfg.spec.model.gammas;
  if (cfg.spec.model.zero_temperature())
    jm["beta"] = "inf";
  else
    jm["beta"] = cfg.spec.model.beta;
  j["model"] = jm;
  j["observable"] = observable_to_json(cfg.spec.obs);
  j["rho0"] = matrix_to_json(cfg.spec.rho0);
  json je;
  je["n"] = cfg.spec.n;
  je["dt"] = cfg.spec.dt;
  je["horizon"] = cfg.spec.horizon;
  je["paths"] = cfg.paths;
  je["seed"] = cfg.seed;
  je["checkpoints"] = cfg.spec.checkpoints;
  je["sde"] = cfg.sde_kind == SdeKind::Auto
                  ? "auto"
                  : (cfg.sde_kind == SdeKind::Thermal ? "thermal" : "zero");
  je["compare"] = cfg.compare_engine == Engine::Discrete ? "discrete" : "continuous";
  if (!cfg.n_list.empty()) je["n_list"] = cfg.n_list;
  j["engine"] = je;
  json jf = json::array();
  for (const auto& f : cfg.spec.functionals) {
    json one;
    one["name"] = f.name;
    one["matrix"] = matrix_to_json(f.op);
    jf.push_back(one);
  }
  j["functionals"] = jf;
  json jo;
  jo["dir"] = cfg.output.dir;
  jo["per_path"] = cfg.output.per_path;
  jo["max_path_files"] = cfg.output.max_path_files;
  j["output"] = jo;
  return j;
}

uint64_t config_hash(const json& j) {
  const std::string dump = j.dump();
  uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string hash_hex(uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qtraj
