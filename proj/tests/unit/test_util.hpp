#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace ranklab::test {

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("ranklab-test-" + std::to_string(::getpid()) + "-" + name + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path source_dir() { return RANKLAB_SOURCE_DIR; }

}  // namespace ranklab::test
