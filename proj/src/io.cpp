#include "qtraj/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace qtraj {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
}

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void state_header(const CMat& sample, std::string& out) {
  for (int r = 0; r < sample.rows(); ++r)
    for (int s = r; s < sample.cols(); ++s) {
      out += ",rho" + std::to_string(r) + std::to_string(s) + "_re";
      out += ",rho" + std::to_string(r) + std::to_string(s) + "_im";
    }
}

void state_row(const CMat& m, std::string& out) {
  for (int r = 0; r < m.rows(); ++r)
    for (int s = r; s < m.cols(); ++s) {
      out += "," + csv_double(m(r, s).real());
      out += "," + csv_double(m(r, s).imag());
    }
}

std::string path_csv(const std::vector<double>& times,
                     const std::vector<DensityMatrix>& states,
                     const std::vector<int>* outcomes,
                     const std::vector<Functional>& fns) {
  std::string out = "t,outcome";
  state_header(states[0].mat(), out);
  for (const auto& f : fns) out += "," + f.name;
  out += "\n";
  for (size_t k = 0; k < states.size(); ++k) {
    out += csv_double(times[k]);
    // Row k holds the state after outcome k-1; the first row has no outcome.
    if (outcomes && k > 0)
      out += "," + std::to_string((*outcomes)[k - 1]);
    else
      out += ",";
    state_row(states[k].mat(), out);
    for (const auto& f : fns)
      out += "," + csv_double(real_expectation(states[k].mat(), f.op));
    out += "\n";
  }
  return out;
}

}  // namespace

json summary_to_json(const EnsembleSummary& summary) {
  json j;
  j["engine"] = summary.engine == Engine::Discrete ? "discrete" : "continuous";
  j["paths"] = summary.paths;
  j["seed"] = summary.seed;
  if (summary.engine == Engine::Discrete)
    j["n"] = summary.n;
  else
    j["dt"] = summary.dt;
  j["functionals"] = summary.functional_names;
  json results = json::array();
  for (size_t c = 0; c < summary.times.size(); ++c) {
    json row;
    row["time"] = summary.times[c];
    json stats = json::array();
    for (size_t f = 0; f < summary.functional_names.size(); ++f) {
      json s;
      s["functional"] = summary.functional_names[f];
      s["mean"] = summary.mean[c][f];
      s["var"] = summary.var[c][f];
      s["se_mean"] = summary.se_mean[c][f];
      s["se_var"] = summary.se_var[c][f];
      stats.push_back(s);
    }
    row["stats"] = stats;
    row["mean_state"] = matrix_to_json(summary.mean_states[c]);
    results.push_back(row);
  }
  j["results"] = results;
  if (summary.has_jump_stats) {
    json jj;
    jj["count_mean"] = summary.jump_count_mean;
    jj["count_se"] = summary.jump_count_se;
    jj["intensity_mean"] = summary.intensity_mean;
    jj["intensity_se"] = summary.intensity_se;
    jj["paired_diff_mean"] = summary.paired_diff_mean;
    jj["paired_diff_se"] = summary.paired_diff_se;
    j["jumps"] = jj;
  }
  json diag;
  diag["max_repair"] = summary.max_repair;
  diag["trace_drift"] = summary.trace_drift;
  diag["intensity_warning"] = summary.intensity_warning;
  j["diagnostics"] = diag;
  return j;
}

std::string ensemble_csv(const EnsembleSummary& summary) {
  std::string out = "time,functional,mean,var,se_mean,se_var\n";
  for (size_t c = 0; c < summary.times.size(); ++c)
    for (size_t f = 0; f < summary.functional_names.size(); ++f) {
      out += csv_double(summary.times[c]) + "," + summary.functional_names[f];
      out += "," + csv_double(summary.mean[c][f]);
      out += "," + csv_double(summary.var[c][f]);
      out += "," + csv_double(summary.se_mean[c][f]);
      out += "," + csv_double(summary.se_var[c][f]);
      out += "\n";
    }
  return out;
}

std::string discrete_path_csv(const DiscretePath& path,
                              const std::vector<Functional>& fns) {
  return path_csv(path.times, path.states, &path.outcomes, fns);
}

std::string continuous_path_csv(const ContinuousPath& path,
                                const std::vector<Functional>& fns) {
  return path_csv(path.times, path.states, nullptr, fns);
}

std::string jumps_csv(const ContinuousPath& path) {
  std::string out = "t,channel\n";
  for (const auto& e : path.jump_log)
    out += csv_double(e.time) + "," + std::to_string(e.channel) + "\n";
  return out;
}

}  // namespace qtraj
