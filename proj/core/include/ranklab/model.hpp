#pragma once

// Behavioral model (position-biased, stance-conditioned clicking followed by
// a Bernoulli highlight) and the popularity-based ranking algorithm with
// per-group personalization.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ranklab/rng.hpp"
#include "ranklab/stance.hpp"

namespace ranklab {

using StanceVector = std::array<double, kNumStances>;
// Indexed [news stance][user stance].
using StanceMatrix = std::array<StanceVector, kNumStances>;

class StanceDistribution {
 public:
  // Entries must be nonnegative and sum to 1 within 1e-12.
  explicit StanceDistribution(const StanceVector& probs);

  static StanceDistribution uniform();
  static StanceDistribution point_mass(Stance s);

  double operator[](Stance s) const { return probs_[s.index()]; }
  const StanceVector& probs() const { return probs_; }

  friend bool operator==(const StanceDistribution&, const StanceDistribution&) = default;

 private:
  StanceVector probs_;
};

// C[s_n, s_u] = P(click on stance s_n | user stance s_u). Columns sum to 1.
class ClickMatrix {
 public:
  explicit ClickMatrix(const StanceMatrix& values);

  static ClickMatrix uniform();

  double operator()(Stance news, Stance user) const { return values_[news.index()][user.index()]; }
  StanceVector column(Stance user) const;
  const StanceMatrix& values() const { return values_; }

  friend bool operator==(const ClickMatrix&, const ClickMatrix&) = default;

 private:
  StanceMatrix values_;
};

// H[s_n, s_u] = P(highlight | click, s_n, s_u).
class HighlightMatrix {
 public:
  explicit HighlightMatrix(const StanceMatrix& values);

  static HighlightMatrix constant(double p);

  double operator()(Stance news, Stance user) const { return values_[news.index()][user.index()]; }
  const StanceMatrix& values() const { return values_; }

  friend bool operator==(const HighlightMatrix&, const HighlightMatrix&) = default;

 private:
  StanceMatrix values_;
};

struct BehaviorParams {
  StanceDistribution user_stance_dist = StanceDistribution::uniform();
  double beta = 1.0;
  ClickMatrix click = ClickMatrix::uniform();
  HighlightMatrix highlight = HighlightMatrix::constant(0.0);

  // Throws ValidationError unless beta >= 1 and finite.
  void validate() const;

  friend bool operator==(const BehaviorParams&, const BehaviorParams&) = default;
};

struct AlgorithmParams {
  double eta = 0.0;     // active-engagement reward
  double lambda = 0.0;  // personalization degree

  void validate() const;

  friend bool operator==(const AlgorithmParams&, const AlgorithmParams&) = default;
};

struct NewsItem {
  std::string id;
  Stance stance{0};
  std::string topic;
  std::string title;
  std::string body;
  std::string source;
};

// A display order over item indices 0..N-1. Ranks are 1-based (1 = top).
class RankedList {
 public:
  RankedList() = default;
  // Throws ValidationError unless `order` is a permutation of 0..N-1.
  explicit RankedList(std::vector<std::size_t> order);

  static RankedList identity(std::size_t n);
  static RankedList random(std::size_t n, Rng& rng);

  std::size_t size() const { return order_.size(); }
  std::size_t rank_of(std::size_t item) const { return position_[item] + 1; }
  std::size_t item_at(std::size_t rank) const { return order_[rank - 1]; }
  const std::vector<std::size_t>& order() const { return order_; }

  friend bool operator==(const RankedList& a, const RankedList& b) { return a.order_ == b.order_; }

 private:
  std::vector<std::size_t> order_;
  std::vector<std::size_t> position_;
};

struct PopularityState {
  std::array<std::vector<double>, kNumGroups> pop;
  std::uint64_t t = 0;

  PopularityState() = default;
  explicit PopularityState(std::size_t n_items);

  std::size_t n_items() const { return pop[0].size(); }
  const std::vector<double>& of(UserGroup g) const { return pop[group_index(g)]; }

  friend bool operator==(const PopularityState&, const PopularityState&) = default;
};

// beta^(n_items - rank). Throws DomainError when rank is outside [1, n_items].
double position_weight(std::size_t rank, std::size_t n_items, double beta);

// Click probability per item index: weight(rank) * C[s_n, s_u], normalized.
// `item_stances` is indexed by item. Throws DegenerateModelError when every
// unnormalized weight is zero.
std::vector<double> click_distribution(std::span<const Stance> item_stances, const RankedList& ranking,
                                       Stance user_stance, const BehaviorParams& params);
std::vector<double> click_distribution(std::span<const NewsItem> items, const RankedList& ranking,
                                       Stance user_stance, const BehaviorParams& params);

std::size_t sample_click(std::span<const double> dist, Rng& rng);

// Always consumes exactly one uniform draw.
bool sample_highlight(Stance news, Stance user, const HighlightMatrix& h, Rng& rng);

double popularity_delta(bool in_group, bool highlighted, const AlgorithmParams& algo);

void apply_interaction_in_place(PopularityState& state, Stance user_stance, std::size_t clicked_item,
                                bool highlighted, const AlgorithmParams& algo);
PopularityState apply_interaction(PopularityState state, Stance user_stance, std::size_t clicked_item,
                                  bool highlighted, const AlgorithmParams& algo);

// Sort by pop[group] descending; equal popularities keep their order in `previous`.
RankedList rank_for_group(const PopularityState& state, UserGroup group, const RankedList& previous);

// Popularity vectors plus the current ranking of every group. The simulator,
// the experiment service and replay all advance runs through apply().
class RankingFeed {
 public:
  RankingFeed(const AlgorithmParams& algo, const RankedList& initial);

  void apply(Stance user_stance, std::size_t clicked_item, bool highlighted);

  const AlgorithmParams& algo() const { return algo_; }
  const PopularityState& state() const { return state_; }
  const RankedList& ranking(UserGroup g) const { return rankings_[group_index(g)]; }
  const std::array<RankedList, kNumGroups>& rankings() const { return rankings_; }
  std::size_t n_items() const { return state_.n_items(); }

 private:
  AlgorithmParams algo_;
  PopularityState state_;
  std::array<RankedList, kNumGroups> rankings_;
};

}  // namespace ranklab
