#pragma once

// Rebuilds run state from an event log. Every record must carry the run's
// next seq (1, 2, ...); applied records advance the popularity state and each
// record's shown rankings must match the state derived from its prefix.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranklab/event.hpp"
#include "ranklab/model.hpp"

namespace ranklab {

struct ReplayedRun {
  std::string run_id;
  std::string topic;
  AlgorithmParams algo;
  std::vector<Stance> item_stances;
  RankingFeed feed;
  std::uint64_t last_seq = 0;
  std::size_t applied = 0;
  std::size_t stale = 0;
};

struct ReplayOptions {
  // Compare each record's shown rankings with the derived state.
  bool verify_rankings = true;
  // Initial ranking per run; defaults to the first record's shown ranking.
  std::map<std::string, RankedList> initial;
};

// Throws IntegrityError naming the run and the gap or mismatch.
std::map<std::string, ReplayedRun> replay(const InteractionLog& log, const ReplayOptions& options = {});

}  // namespace ranklab
