#pragma once

// Consumption metrics over a trailing window of clicks, plus the rank and
// click-share summaries used to compare ranking scenarios.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ranklab/event.hpp"
#include "ranklab/stance.hpp"

namespace ranklab {

struct ClickObservation {
  Stance clicked_stance;
  UserGroup user_group;
};

// Clicks ordered by time, at most `w` of them.
struct MetricWindow {
  std::vector<ClickObservation> clicks;
  std::size_t w = 0;

  // Last `w` applied events ending at (exclusive) index `end`.
  static MetricWindow trailing(std::span<const InteractionEvent> events, std::size_t end, std::size_t w);
  static MetricWindow trailing(std::span<const EventRecord> records, std::size_t end, std::size_t w);
};

// Mean absolute clicked stance. Throws UndefinedMetricError on an empty window.
double extremism(const MetricWindow& window);
// Mean clicked stance of R-group users minus that of L-group users; center
// users are excluded. Throws UndefinedMetricError when either side is empty.
double polarization(const MetricWindow& window);

std::optional<double> try_extremism(const MetricWindow& window);
std::optional<double> try_polarization(const MetricWindow& window);

// Per-click contribution to polarization: +s for R users, -s for L users,
// none for center users. Used as the unit of the Mann-Whitney comparison.
std::optional<double> polarization_contribution(Stance clicked, UserGroup group);

using StanceRanks = std::array<std::optional<double>, kNumStances>;

// Mean displayed position of each news stance. With a group filter only
// events from users of that group contribute.
StanceRanks avg_rank_by_stance(std::span<const InteractionEvent> events,
                               std::optional<UserGroup> group_filter = std::nullopt);

// Same average, taken over a group's own ranking at every event.
StanceRanks avg_group_ranking_by_stance(std::span<const InteractionEvent> events, UserGroup group);

using GroupShares = std::array<std::optional<std::array<double, kNumStances>>, kNumGroups>;
using GroupCounts = std::array<std::array<double, kNumStances>, kNumGroups>;

GroupCounts click_counts_by_group(std::span<const InteractionEvent> events);
// Per user group, the share of clicks going to each news stance. Groups
// without clicks are missing.
GroupShares click_share_by_group(std::span<const InteractionEvent> events);

}  // namespace ranklab
