#pragma once

// Reproducible experiment harness: JSON config in, JSON summary plus
// plot-ready CSV out.  Every random draw flows through derive_seed(seed,
// index), and aggregation is ordered by sample index, so outputs are byte
// identical across re-runs and thread counts.

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "latmin/regular_pair.hpp"
#include "latmin/samplers.hpp"

namespace latmin {

struct RunOutput {
  nlohmann::json summary;                        // also written as *.json
  std::map<std::string, std::string> files;      // name -> exact bytes
  bool verified = true;                          // verify mode only
};

// Shared pieces of the config schema.
RegularPair parse_pair(const nlohmann::json& spec);
MeasureSpec parse_measure(const nlohmann::json& spec);
std::vector<ScalingVector> parse_family(const nlohmann::json& spec, int dim,
                                        ScalingFamily* family_out = nullptr);

// Subcommand runners.  `threads` is execution metadata and never part of the
// embedded config, so outputs do not depend on it.
RunOutput run_sample(const nlohmann::json& config);
RunOutput run_experiment(const nlohmann::json& config, int threads);
RunOutput run_verify(const nlohmann::json& config, int threads);
RunOutput run_loglaw(const nlohmann::json& config, int threads);
RunOutput run_volume(const nlohmann::json& config);

// Shortest round-trip decimal formatting; infinities serialize as "inf".
std::string format_double(double v);

// FNV-1a 64 over the canonical config dump, as fixed-width hex.
std::string config_hash(const nlohmann::json& config);

// Throws std::invalid_argument naming the first key outside `allowed`.
void reject_unknown_keys(const nlohmann::json& config,
                         std::initializer_list<const char*> allowed);

}  // namespace latmin
