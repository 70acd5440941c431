#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "fieldgen/datasets/synthetic.hpp"
#include "fieldgen/dynamics/sde.hpp"
#include "json.hpp"

namespace fieldgen::cli {

using nlohmann::json;

/// Command failures carrying the process exit code:
/// 2 usage/config, 3 numerical.
struct CliError : std::runtime_error {
  int exit_code;
  CliError(int code, const std::string& message) : std::runtime_error(message), exit_code(code) {}
};

json load_config_file(const std::string& path);

/// Apply one dotted-key override, e.g. "train.epsilon=0.1". Values parse as
/// JSON when possible, else as strings.
void apply_override(json& cfg, const std::string& assignment);

/// Unknown keys are config errors; every accepted key has a documented
/// default.
void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& scope);

template <typename T>
T get_or(const json& j, const std::string& key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const std::exception& e) {
    throw CliError(2, "config key '" + key + "': " + e.what());
  }
}

/// Resolve the output directory: config/flag value, else $FIELDGEN_OUT_ROOT,
/// else ./runs; a per-command subdirectory is appended for the defaults.
std::string resolve_out_dir(const json& cfg, const std::string& command);

/// Synthetic dataset described by {"kind": ..., "n": ..., ...}.
numkit::SampleSet make_dataset(const json& spec, std::uint64_t seed);

/// Closed-form 1-D or 2-D density with exact gradient, for analytic sampling
/// and the density-evolution verifier.
dynamics::AnalyticTarget make_analytic_target(const json& spec);

int dataset_dim(const json& spec);

}  // namespace fieldgen::cli
