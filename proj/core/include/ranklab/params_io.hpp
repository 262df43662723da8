#pragma once

// Versioned parameters file written by estimation and read by the simulator.
//
// {
//   "format_version": 1,
//   "kind": "behavior_params",
//   "mode": "pooled" | "per_topic",
//   "topics": {
//     "<topic>": {
//       "user_stance_dist": [5], "beta": x,
//       "click": [[5] x 5], "highlight": [[5] x 5],   // [news stance][user stance]
//       "log_likelihood": x, "n_events": n, "n_users": n,
//       "flags": {"non_identifiable": b, "not_converged": b},
//       "warnings": [...],
//       "ci": {"level": 0.95, "replicates": n, "skipped": n, "low": {...}, "high": {...}}
//     }
//   }
// }
//
// Missing highlight cells are null. Stance offsets are value + 2.

#include <filesystem>
#include <map>
#include <string>

#include "ranklab/estimation.hpp"

namespace ranklab {

inline constexpr int kParamsFormatVersion = 1;

struct ParamsFile {
  std::string mode = "pooled";
  std::map<std::string, EstimationResult> topics;
};

std::string params_to_json(const ParamsFile& file);
ParamsFile params_from_json(const std::string& text);

void write_params_file(const std::filesystem::path& path, const ParamsFile& file);
ParamsFile read_params_file(const std::filesystem::path& path);

// Behavior parameters for one topic entry. An empty topic selects "pooled",
// or the only entry when the file holds one.
BehaviorParams load_behavior_params(const std::filesystem::path& path, const std::string& topic = {});
BehaviorParams behavior_for_topic(const ParamsFile& file, const std::string& topic = {});

ParamsFile params_file_from(const std::map<std::string, BehaviorParams>& topics, const std::string& mode);

}  // namespace ranklab
