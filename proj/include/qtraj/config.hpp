#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "qtraj/harness.hpp"

namespace qtraj {

using json = nlohmann::json;

enum class SdeKind { Auto, Thermal, Zero };

struct OutputOptions {
  std::string dir = "out";
  bool per_path = false;
  int max_path_files = 16;
};

// One fully specified run: scenario plus engine and output settings.
// The JSON layout is documented in the README; complex numbers are [re, im]
// pairs, matrices row-major nested arrays, beta accepts the string "inf".
struct RunConfig {
  RunSpec spec;
  long paths = 1000;
  uint64_t seed = 1;
  SdeKind sde_kind = SdeKind::Auto;
  Engine compare_engine = Engine::Continuous;
  std::vector<long> n_list;
  OutputOptions output;
};

// Throw ValidationError naming the offending field on malformed input.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);
json config_to_json(const RunConfig& c);

json matrix_to_json(const CMat& m);
CMat matrix_from_json(const json& j, const std::string& where);

// FNV-1a over the canonical (key-sorted) dump; identifies the config in
// output manifests.
uint64_t config_hash(const json& j);
std::string hash_hex(uint64_t h);

}  // namespace qtraj
