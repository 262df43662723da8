#include "doctest.h"
#include "ranklab/error.hpp"
#include "ranklab/event.hpp"
#include "ranklab/metrics.hpp"
#include "ranklab/rng.hpp"

using namespace ranklab;

namespace {

MetricWindow window_of(std::initializer_list<std::pair<int, UserGroup>> clicks) {
  MetricWindow w;
  for (const auto& [s, g] : clicks) w.clicks.push_back({Stance(s), g});
  w.w = w.clicks.size();
  return w;
}

InteractionEvent event_with(std::uint64_t seq, Stance user, const RankedList& ranking, std::size_t item,
                            const std::vector<Stance>& stances) {
  std::array<RankedList, kNumGroups> shown;
  shown.fill(ranking);
  return make_event(seq, "s", "t", user, stances, shown, item, EngagementChoice::Nothing, AlgorithmParams{});
}

std::vector<Stance> two_per_stance() {
  std::vector<Stance> s;
  for (std::size_t i = 0; i < 10; ++i) s.push_back(Stance::from_index(i / 2));
  return s;
}

}  // namespace

TEST_CASE("extremism") {
  constexpr auto L = UserGroup::Left;
  CHECK(extremism(window_of({{2, L}, {-2, L}, {0, L}, {1, L}})) == doctest::Approx(1.25));
  CHECK(extremism(window_of({{0, L}, {0, L}})) == 0.0);
  CHECK(extremism(window_of({{2, L}, {-2, L}})) == 2.0);
  CHECK_THROWS_AS(extremism(MetricWindow{}), UndefinedMetricError);
  CHECK_FALSE(try_extremism(MetricWindow{}).has_value());
}

TEST_CASE("polarization") {
  constexpr auto L = UserGroup::Left;
  constexpr auto C = UserGroup::Center;
  constexpr auto R = UserGroup::Right;
  CHECK(polarization(window_of({{2, R}, {1, R}, {-1, L}, {-1, L}})) == doctest::Approx(2.5));
  CHECK(polarization(window_of({{0, R}, {0, L}})) == 0.0);
  CHECK(polarization(window_of({{2, L}, {2, L}, {-2, R}, {-2, R}})) == doctest::Approx(-4.0));
  // Center-group clicks do not enter either term.
  CHECK(polarization(window_of({{2, R}, {-2, L}, {2, C}, {2, C}})) == doctest::Approx(4.0));
  CHECK_THROWS_AS(polarization(window_of({{-2, L}, {-1, L}})), UndefinedMetricError);
  CHECK_FALSE(try_polarization(window_of({{-2, L}, {0, C}})).has_value());
  CHECK(polarization_contribution(Stance(2), R) == 2.0);
  CHECK(polarization_contribution(Stance(2), L) == -2.0);
  CHECK_FALSE(polarization_contribution(Stance(2), C).has_value());
}

TEST_CASE("metric ranges") {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    MetricWindow w;
    const std::size_t n = 1 + rng.below(30);
    for (std::size_t i = 0; i < n; ++i) {
      w.clicks.push_back({Stance::from_index(rng.below(5)), kAllGroups[rng.below(3)]});
    }
    w.w = n;
    const double e = extremism(w);
    CHECK(e >= 0.0);
    CHECK(e <= 2.0);
    if (auto p = try_polarization(w)) {
      CHECK(*p >= -4.0);
      CHECK(*p <= 4.0);
    }
  }
}

TEST_CASE("trailing window") {
  const auto stances = two_per_stance();
  std::vector<InteractionEvent> events;
  for (std::size_t i = 0; i < 10; ++i) {
    events.push_back(event_with(i + 1, Stance(-2), RankedList::identity(10), i, stances));
  }
  const MetricWindow w = MetricWindow::trailing(events, events.size(), 4);
  REQUIRE(w.clicks.size() == 4);
  CHECK(w.clicks.front().clicked_stance == Stance(1));
  CHECK(w.clicks.back().clicked_stance == Stance(2));
  CHECK(MetricWindow::trailing(events, 2, 4).clicks.size() == 2);

  std::vector<EventRecord> records;
  for (const auto& e : events) records.push_back({"run", e});
  records[9].applied = false;
  const MetricWindow wr = MetricWindow::trailing(records, records.size(), 3);
  REQUIRE(wr.clicks.size() == 3);
  // The unapplied last record is skipped.
  CHECK(wr.clicks.back().clicked_stance == Stance(2));
  CHECK(wr.clicks.front().clicked_stance == Stance(1));
}

TEST_CASE("average rank by stance") {
  const auto stances = two_per_stance();
  const RankedList r({9, 8, 7, 6, 5, 4, 3, 2, 1, 0});
  std::vector<InteractionEvent> events = {event_with(1, Stance(0), r, 0, stances)};
  const auto ranks = avg_rank_by_stance(events);
  // Stance -2 holds items 0 and 1 at ranks 10 and 9.
  CHECK(*ranks[0] == doctest::Approx(9.5));
  CHECK(*ranks[4] == doctest::Approx(1.5));
  CHECK(*ranks[2] == doctest::Approx(5.5));
  const auto left_only = avg_rank_by_stance(events, UserGroup::Left);
  CHECK_FALSE(left_only[0].has_value());
  const auto group = avg_group_ranking_by_stance(events, UserGroup::Right);
  CHECK(*group[4] == doctest::Approx(1.5));
}

TEST_CASE("click shares") {
  const auto stances = two_per_stance();
  std::vector<InteractionEvent> events;
  for (std::uint64_t i = 0; i < 6; ++i) events.push_back(event_with(i + 1, Stance(-1), RankedList::identity(10), 0, stances));
  const auto shares = click_share_by_group(events);
  REQUIRE(shares[0].has_value());
  CHECK((*shares[0])[0] == 1.0);
  CHECK_FALSE(shares[1].has_value());
  CHECK_FALSE(shares[2].has_value());

  Rng rng(4);
  std::vector<InteractionEvent> uniform;
  for (std::uint64_t i = 0; i < 30000; ++i) {
    uniform.push_back(event_with(i + 1, Stance::from_index(rng.below(5)), RankedList::identity(10), rng.below(10), stances));
  }
  const auto u = click_share_by_group(uniform);
  for (UserGroup g : kAllGroups) {
    REQUIRE(u[group_index(g)].has_value());
    double sum = 0;
    for (double x : *u[group_index(g)]) {
      CHECK(std::abs(x - 0.2) < 0.02);
      sum += x;
    }
    CHECK(sum == doctest::Approx(1.0));
  }
}
