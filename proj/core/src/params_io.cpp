#include "ranklab/params_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ranklab/error.hpp"

namespace ranklab {

using nlohmann::json;

namespace {

json estimate_json(const ParameterEstimate& p) {
  json j;
  j["user_stance_dist"] = p.user_stance;
  j["beta"] = p.beta;
  j["click"] = p.click;
  json h = json::array();
  for (const auto& row : p.highlight) {
    json r = json::array();
    for (const auto& cell : row) r.push_back(cell ? json(*cell) : json(nullptr));
    h.push_back(r);
  }
  j["highlight"] = h;
  return j;
}

StanceMatrix matrix_from(const json& j, const char* name) {
  if (!j.is_array() || j.size() != kNumStances) throw ConfigError(std::string(name) + " must be a 5x5 array");
  StanceMatrix m{};
  for (std::size_t n = 0; n < kNumStances; ++n) {
    if (!j[n].is_array() || j[n].size() != kNumStances) throw ConfigError(std::string(name) + " must be a 5x5 array");
    for (std::size_t u = 0; u < kNumStances; ++u) {
      if (!j[n][u].is_number()) throw ConfigError(std::string(name) + " entries must be numbers");
      m[n][u] = j[n][u].get<double>();
    }
  }
  return m;
}

ParameterEstimate estimate_from(const json& j) {
  ParameterEstimate p;
  if (!j.contains("user_stance_dist") || !j.contains("beta") || !j.contains("click") || !j.contains("highlight")) {
    throw ConfigError("parameter entry needs user_stance_dist, beta, click and highlight");
  }
  const json& d = j["user_stance_dist"];
  if (!d.is_array() || d.size() != kNumStances) throw ConfigError("user_stance_dist must have 5 entries");
  for (std::size_t s = 0; s < kNumStances; ++s) p.user_stance[s] = d[s].get<double>();
  p.beta = j["beta"].get<double>();
  p.click = matrix_from(j["click"], "click");
  const json& h = j["highlight"];
  if (!h.is_array() || h.size() != kNumStances) throw ConfigError("highlight must be a 5x5 array");
  for (std::size_t n = 0; n < kNumStances; ++n) {
    if (!h[n].is_array() || h[n].size() != kNumStances) throw ConfigError("highlight must be a 5x5 array");
    for (std::size_t u = 0; u < kNumStances; ++u) {
      if (h[n][u].is_number()) p.highlight[n][u] = h[n][u].get<double>();
    }
  }
  return p;
}

}  // namespace

std::string params_to_json(const ParamsFile& file) {
  json root;
  root["format_version"] = kParamsFormatVersion;
  root["kind"] = "behavior_params";
  root["mode"] = file.mode;
  json topics = json::object();
  for (const auto& [name, r] : file.topics) {
    json t = estimate_json(r.point);
    t["log_likelihood"] = r.log_likelihood;
    t["n_events"] = r.n_events;
    t["n_users"] = r.n_users;
    t["flags"] = {{"non_identifiable", r.non_identifiable}, {"not_converged", r.not_converged}};
    t["warnings"] = r.warnings;
    if (r.ci_low && r.ci_high) {
      t["ci"] = {{"level", 0.95},
                 {"replicates", r.replicates},
                 {"skipped", r.skipped},
                 {"low", estimate_json(*r.ci_low)},
                 {"high", estimate_json(*r.ci_high)}};
    }
    topics[name] = std::move(t);
  }
  root["topics"] = std::move(topics);
  return root.dump(2) + "\n";
}

ParamsFile params_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed parameters file: ") + e.what());
  }
  try {
    if (root.value("format_version", 0) != kParamsFormatVersion) {
      throw ConfigError("parameters file must declare format_version 1");
    }
    if (root.value("kind", std::string{}) != "behavior_params") {
      throw ConfigError("parameters file kind must be behavior_params");
    }
    ParamsFile file;
    file.mode = root.value("mode", std::string("pooled"));
    if (!root.contains("topics") || !root["topics"].is_object() || root["topics"].empty()) {
      throw ConfigError("parameters file has no topic entries");
    }
    for (const auto& [name, t] : root["topics"].items()) {
      EstimationResult r;
      r.point = estimate_from(t);
      r.log_likelihood = t.value("log_likelihood", 0.0);
      r.n_events = t.value("n_events", std::size_t{0});
      r.n_users = t.value("n_users", std::size_t{0});
      if (t.contains("flags")) {
        r.non_identifiable = t["flags"].value("non_identifiable", false);
        r.not_converged = t["flags"].value("not_converged", false);
      }
      if (t.contains("warnings")) r.warnings = t["warnings"].get<std::vector<std::string>>();
      if (t.contains("ci")) {
        const json& ci = t["ci"];
        r.replicates = ci.value("replicates", std::size_t{0});
        r.skipped = ci.value("skipped", std::size_t{0});
        r.ci_low = estimate_from(ci.at("low"));
        r.ci_high = estimate_from(ci.at("high"));
      }
      file.topics.emplace(name, std::move(r));
    }
    return file;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid parameters file: ") + e.what());
  }
}

void write_params_file(const std::filesystem::path& path, const ParamsFile& file) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write parameters file: " + path.string());
  out << params_to_json(file);
}

ParamsFile read_params_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open parameters file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return params_from_json(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

BehaviorParams behavior_for_topic(const ParamsFile& file, const std::string& topic) {
  std::string key = topic;
  if (key.empty()) key = file.topics.size() == 1 ? file.topics.begin()->first : "pooled";
  auto it = file.topics.find(key);
  if (it == file.topics.end()) throw ConfigError("parameters file has no entry for topic '" + key + "'");
  try {
    return it->second.point.to_behavior();
  } catch (const ValidationError& e) {
    throw ConfigError("topic '" + key + "': " + e.what());
  }
}

BehaviorParams load_behavior_params(const std::filesystem::path& path, const std::string& topic) {
  return behavior_for_topic(read_params_file(path), topic);
}

ParamsFile params_file_from(const std::map<std::string, BehaviorParams>& topics, const std::string& mode) {
  ParamsFile file;
  file.mode = mode;
  for (const auto& [name, params] : topics) {
    EstimationResult r;
    r.point = ParameterEstimate::from_behavior(params);
    file.topics.emplace(name, std::move(r));
  }
  return file;
}

}  // namespace ranklab
