#include "ranklab/replay.hpp"

#include "ranklab/error.hpp"

namespace ranklab {

std::map<std::string, ReplayedRun> replay(const InteractionLog& log, const ReplayOptions& options) {
  std::map<std::string, ReplayedRun> runs;
  for (const auto& record : log.records) {
    const auto& e = record.event;
    auto it = runs.find(record.run_id);
    if (it == runs.end()) {
      if (!e.scenario) {
        throw IntegrityError("run '" + record.run_id + "' has no scenario; static logs cannot be replayed");
      }
      auto init = options.initial.find(record.run_id);
      const RankedList& initial = init != options.initial.end() ? init->second : e.shown[0];
      it = runs.emplace(record.run_id,
                        ReplayedRun{record.run_id, e.topic, *e.scenario, e.item_stances, RankingFeed(*e.scenario, initial)})
               .first;
    }
    ReplayedRun& run = it->second;
    if (e.seq != run.last_seq + 1) {
      throw IntegrityError("run '" + record.run_id + "': seq gap, expected " + std::to_string(run.last_seq + 1) +
                           " but found " + std::to_string(e.seq));
    }
    if (e.scenario && !(*e.scenario == run.algo)) {
      throw IntegrityError("run '" + record.run_id + "': scenario changed at seq " + std::to_string(e.seq));
    }
    if (e.item_stances != run.item_stances) {
      throw IntegrityError("run '" + record.run_id + "': item set changed at seq " + std::to_string(e.seq));
    }
    // Stale records may have been served before later applied events.
    if (options.verify_rankings && record.applied) {
      for (UserGroup g : kAllGroups) {
        if (!(e.shown[group_index(g)] == run.feed.ranking(g))) {
          throw IntegrityError("run '" + record.run_id + "': shown " + std::string(group_tag(g)) +
                               " ranking at seq " + std::to_string(e.seq) + " differs from the replayed state");
        }
      }
    }
    run.last_seq = e.seq;
    if (record.applied) {
      run.feed.apply(e.user_stance, e.clicked_item, e.highlighted);
      ++run.applied;
    } else {
      ++run.stale;
    }
  }
  return runs;
}

}  // namespace ranklab
