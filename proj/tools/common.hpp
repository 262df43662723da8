#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ranklab/model.hpp"
#include "ranklab/params_io.hpp"

namespace ranklab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

// Bad flag values detected after parsing; reported with exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options shared by every subcommand. Values given on the command line win
// over the config file, which wins over built-in defaults.
struct Common {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::size_t window = 200;
  std::size_t burn_in = 50;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* window_opt = nullptr;
  CLI::Option* burn_in_opt = nullptr;

  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> argv;

  void add_to(CLI::App& app);
  // Loads the config file (if any) and fills unset shared options from it.
  void resolve();

  // A config value when the flag was not given on the command line.
  template <class T>
  T pick(const CLI::Option* opt, const T& flag_value, const char* key, const T& fallback) const {
    if (opt && opt->count() > 0) return flag_value;
    if (config.contains(key) && !config[key].is_null()) return config[key].get<T>();
    return fallback;
  }

  std::filesystem::path out_dir() const;
};

std::vector<double> parse_grid(const std::string& text, const char* flag);

// Behavior parameters from a params file, or from the built-in presets when
// `params_path` is empty ("pooled" or a survey topic name).
BehaviorParams resolve_behavior(const std::string& params_path, const std::string& topic);

// Topic name -> parameters: every entry of a params file, or the presets
// (pooled plus the four topics).
std::vector<std::pair<std::string, BehaviorParams>> behavior_table(const std::string& params_path);

std::string sha256_file(const std::filesystem::path& path);

// Writes manifest.json into `dir`.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const Common& common,
                    const std::vector<std::filesystem::path>& inputs, const std::vector<std::string>& outputs);

// Fixed-precision number formatting; missing values print as "NA".
std::string num(double v, int precision = 6);
std::string num(const std::optional<double>& v, int precision = 6);

std::string stars(double p);

}  // namespace ranklab::cli
