#pragma once

#include <string>

#include "qtraj/config.hpp"

namespace qtraj {

void ensure_dir(const std::string& dir);
void write_text(const std::string& path, const std::string& content);

// All floats in CSV output use %.17g so files round-trip exactly.
std::string csv_double(double v);

json summary_to_json(const EnsembleSummary& summary);
std::string ensemble_csv(const EnsembleSummary& summary);

std::string discrete_path_csv(const DiscretePath& path,
                              const std::vector<Functional>& fns);
std::string continuous_path_csv(const ContinuousPath& path,
                                const std::vector<Functional>& fns);
std::string jumps_csv(const ContinuousPath& path);

}  // namespace qtraj
