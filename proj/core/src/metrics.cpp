#include "ranklab/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ranklab/error.hpp"

namespace ranklab {

MetricWindow MetricWindow::trailing(std::span<const InteractionEvent> events, std::size_t end, std::size_t w) {
  MetricWindow window;
  window.w = w;
  end = std::min(end, events.size());
  const std::size_t begin = end > w ? end - w : 0;
  window.clicks.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    window.clicks.push_back({events[i].clicked_stance, group_of(events[i].user_stance)});
  }
  return window;
}

MetricWindow MetricWindow::trailing(std::span<const EventRecord> records, std::size_t end, std::size_t w) {
  MetricWindow window;
  window.w = w;
  end = std::min(end, records.size());
  for (std::size_t i = end; i > 0 && window.clicks.size() < w; --i) {
    const auto& r = records[i - 1];
    if (!r.applied) continue;
    window.clicks.push_back({r.event.clicked_stance, group_of(r.event.user_stance)});
  }
  std::reverse(window.clicks.begin(), window.clicks.end());
  return window;
}

std::optional<double> try_extremism(const MetricWindow& window) {
  if (window.clicks.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& c : window.clicks) sum += std::abs(c.clicked_stance.value());
  return sum / static_cast<double>(window.clicks.size());
}

std::optional<double> try_polarization(const MetricWindow& window) {
  double sum_r = 0.0, sum_l = 0.0;
  std::size_t n_r = 0, n_l = 0;
  for (const auto& c : window.clicks) {
    if (c.user_group == UserGroup::Right) {
      sum_r += c.clicked_stance.value();
      ++n_r;
    } else if (c.user_group == UserGroup::Left) {
      sum_l += c.clicked_stance.value();
      ++n_l;
    }
  }
  if (n_r == 0 || n_l == 0) return std::nullopt;
  return sum_r / static_cast<double>(n_r) - sum_l / static_cast<double>(n_l);
}

double extremism(const MetricWindow& window) {
  auto v = try_extremism(window);
  if (!v) throw UndefinedMetricError("extremism is undefined on an empty window");
  return *v;
}

double polarization(const MetricWindow& window) {
  auto v = try_polarization(window);
  if (!v) throw UndefinedMetricError("polarization needs clicks from both L-group and R-group users");
  return *v;
}

std::optional<double> polarization_contribution(Stance clicked, UserGroup group) {
  switch (group) {
    case UserGroup::Right:
      return static_cast<double>(clicked.value());
    case UserGroup::Left:
      return -static_cast<double>(clicked.value());
    case UserGroup::Center:
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

void accumulate_ranks(const InteractionEvent& e, const RankedList& ranking, std::array<double, kNumStances>& sum,
                      std::array<std::size_t, kNumStances>& count) {
  for (std::size_t item = 0; item < e.item_stances.size(); ++item) {
    const std::size_t s = e.item_stances[item].index();
    sum[s] += static_cast<double>(ranking.rank_of(item));
    ++count[s];
  }
}

StanceRanks finish(const std::array<double, kNumStances>& sum, const std::array<std::size_t, kNumStances>& count) {
  StanceRanks out;
  for (std::size_t s = 0; s < kNumStances; ++s) {
    if (count[s] > 0) out[s] = sum[s] / static_cast<double>(count[s]);
  }
  return out;
}

}  // namespace

StanceRanks avg_rank_by_stance(std::span<const InteractionEvent> events, std::optional<UserGroup> group_filter) {
  std::array<double, kNumStances> sum{};
  std::array<std::size_t, kNumStances> count{};
  for (const auto& e : events) {
    if (group_filter && group_of(e.user_stance) != *group_filter) continue;
    accumulate_ranks(e, e.displayed, sum, count);
  }
  return finish(sum, count);
}

StanceRanks avg_group_ranking_by_stance(std::span<const InteractionEvent> events, UserGroup group) {
  std::array<double, kNumStances> sum{};
  std::array<std::size_t, kNumStances> count{};
  for (const auto& e : events) accumulate_ranks(e, e.shown[group_index(group)], sum, count);
  return finish(sum, count);
}

GroupCounts click_counts_by_group(std::span<const InteractionEvent> events) {
  GroupCounts counts{};
  for (const auto& e : events) counts[group_index(group_of(e.user_stance))][e.clicked_stance.index()] += 1.0;
  return counts;
}

GroupShares click_share_by_group(std::span<const InteractionEvent> events) {
  const GroupCounts counts = click_counts_by_group(events);
  GroupShares shares;
  for (std::size_t g = 0; g < kNumGroups; ++g) {
    double total = 0.0;
    for (double c : counts[g]) total += c;
    if (total == 0.0) continue;
    std::array<double, kNumStances> row{};
    for (std::size_t s = 0; s < kNumStances; ++s) row[s] = counts[g][s] / total;
    shares[g] = row;
  }
  return shares;
}

}  // namespace ranklab
