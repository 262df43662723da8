#include "common.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ranklab/error.hpp"
#include "ranklab/presets.hpp"

#ifndef RANKLAB_VERSION
#define RANKLAB_VERSION "unknown"
#endif

namespace ranklab::cli {

using nlohmann::json;

void Common::add_to(CLI::App& app) {
  app.add_option("--config", config_path, "JSON config file (format_version 1)");
  seed_opt = app.add_option("--seed", seed, "Base random seed");
  app.add_option("--out", out, "Output directory")->capture_default_str();
  window_opt = app.add_option("--window", window, "Metric window length w")->check(CLI::PositiveNumber);
  burn_in_opt = app.add_option("--burn-in", burn_in, "Interactions discarded before the steady window");
}

void Common::resolve() {
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file: " + config_path);
    try {
      config = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(config_path + ": " + e.what());
    }
    if (!config.is_object()) throw ConfigError(config_path + ": config must be a JSON object");
    if (config.value("format_version", 1) != 1) throw ConfigError(config_path + ": unsupported format_version");
  }
  try {
    seed = pick<std::uint64_t>(seed_opt, seed, "seed", seed);
    window = pick<std::size_t>(window_opt, window, "window", window);
    burn_in = pick<std::size_t>(burn_in_opt, burn_in, "burn_in", burn_in);
  } catch (const json::exception& e) {
    throw ConfigError(config_path + ": " + e.what());
  }
  if (window == 0) throw ConfigError("window must be positive");
}

std::filesystem::path Common::out_dir() const {
  std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<double> parse_grid(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      const double v = std::stod(part, &used);
      if (part.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(part);
      values.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": not a number: '" + part + "'");
    }
  }
  if (values.empty()) throw UsageError(std::string(flag) + " needs at least one value");
  return values;
}

BehaviorParams resolve_behavior(const std::string& params_path, const std::string& topic) {
  if (params_path.empty()) return presets::topic(topic.empty() ? "pooled" : topic);
  return load_behavior_params(params_path, topic);
}

std::vector<std::pair<std::string, BehaviorParams>> behavior_table(const std::string& params_path) {
  std::vector<std::pair<std::string, BehaviorParams>> out;
  if (params_path.empty()) {
    out.emplace_back("pooled", presets::pooled());
    for (const auto& t : presets::topic_names()) out.emplace_back(t, presets::topic(t));
    return out;
  }
  const ParamsFile file = read_params_file(params_path);
  for (const auto& [name, _] : file.topics) out.emplace_back(name, behavior_for_topic(file, name));
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const Common& common,
                    const std::vector<std::filesystem::path>& inputs, const std::vector<std::string>& outputs) {
  json m;
  m["format_version"] = 1;
  m["command"] = command;
  m["args"] = common.argv;
  m["seed"] = common.seed;
  m["window"] = common.window;
  m["burn_in"] = common.burn_in;
  if (common.config_path.empty()) {
    m["config"] = nullptr;
  } else {
    m["config"] = {{"path", common.config_path}, {"sha256", sha256_file(common.config_path)}};
  }
  json in = json::array();
  for (const auto& p : inputs) in.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  m["inputs"] = in;
  m["outputs"] = outputs;
  m["versions"] = {{"ranklab", RANKLAB_VERSION},
                   {"compiler", __VERSION__},
                   {"event_log_format", 1},
                   {"params_format", kParamsFormatVersion}};
  std::ofstream out(dir / "manifest.json");
  out << m.dump(2) << '\n';
}

std::string num(double v, int precision) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string num(const std::optional<double>& v, int precision) { return v ? num(*v, precision) : "NA"; }

std::string stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

}  // namespace ranklab::cli
