// Writes the built-in parameter presets as parameters files.

#include <iostream>
#include <map>

#include "ranklab/params_io.hpp"
#include "ranklab/presets.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: ranklab_export_presets <dir>\n";
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  std::filesystem::create_directories(dir);
  ranklab::write_params_file(dir / "pooled.json",
                             ranklab::params_file_from({{"pooled", ranklab::presets::pooled()}}, "pooled"));
  std::map<std::string, ranklab::BehaviorParams> topics;
  for (const auto& t : ranklab::presets::topic_names()) topics.emplace(t, ranklab::presets::topic(t));
  ranklab::write_params_file(dir / "topics.json", ranklab::params_file_from(topics, "per_topic"));
  return 0;
}
