#include "ranklab/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ranklab/error.hpp"

namespace ranklab {

namespace {

constexpr double kSimplexTol = 1e-12;

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError(std::string(what) + " entries must lie in [0,1], got " + std::to_string(p));
  }
}

}  // namespace

StanceDistribution::StanceDistribution(const StanceVector& probs) : probs_(probs) {
  double sum = 0.0;
  for (double p : probs_) {
    check_probability(p, "stance distribution");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSimplexTol) {
    throw ValidationError("stance distribution must sum to 1, got " + std::to_string(sum));
  }
}

StanceDistribution StanceDistribution::uniform() {
  StanceVector v;
  v.fill(1.0 / kNumStances);
  return StanceDistribution(v);
}

StanceDistribution StanceDistribution::point_mass(Stance s) {
  StanceVector v{};
  v[s.index()] = 1.0;
  return StanceDistribution(v);
}

ClickMatrix::ClickMatrix(const StanceMatrix& values) : values_(values) {
  for (std::size_t u = 0; u < kNumStances; ++u) {
    double sum = 0.0;
    for (std::size_t n = 0; n < kNumStances; ++n) {
      check_probability(values_[n][u], "click matrix");
      sum += values_[n][u];
    }
    if (std::abs(sum - 1.0) > kSimplexTol) {
      throw ValidationError("click matrix column for user stance " + std::to_string(int(u) - 2) +
                            " must sum to 1, got " + std::to_string(sum));
    }
  }
}

ClickMatrix ClickMatrix::uniform() {
  StanceMatrix m;
  for (auto& row : m) row.fill(1.0 / kNumStances);
  return ClickMatrix(m);
}

StanceVector ClickMatrix::column(Stance user) const {
  StanceVector col;
  for (std::size_t n = 0; n < kNumStances; ++n) col[n] = values_[n][user.index()];
  return col;
}

HighlightMatrix::HighlightMatrix(const StanceMatrix& values) : values_(values) {
  for (const auto& row : values_)
    for (double p : row) check_probability(p, "highlight matrix");
}

HighlightMatrix HighlightMatrix::constant(double p) {
  StanceMatrix m;
  for (auto& row : m) row.fill(p);
  return HighlightMatrix(m);
}

void BehaviorParams::validate() const {
  if (!(beta >= 1.0) || !std::isfinite(beta)) {
    throw ValidationError("position bias beta must be finite and >= 1, got " + std::to_string(beta));
  }
}

void AlgorithmParams::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ValidationError("eta must be finite and >= 0, got " + std::to_string(eta));
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("lambda must lie in [0,1], got " + std::to_string(lambda));
  }
}

RankedList::RankedList(std::vector<std::size_t> order) : order_(std::move(order)) {
  const std::size_t n = order_.size();
  position_.assign(n, n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t item = order_[pos];
    if (item >= n || position_[item] != n) {
      throw ValidationError("ranking is not a permutation of 0.." + std::to_string(n - 1));
    }
    position_[item] = pos;
  }
}

RankedList RankedList::identity(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return RankedList(std::move(order));
}

RankedList RankedList::random(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  return RankedList(std::move(order));
}

PopularityState::PopularityState(std::size_t n_items) {
  for (auto& v : pop) v.assign(n_items, 0.0);
}

double position_weight(std::size_t rank, std::size_t n_items, double beta) {
  if (rank < 1 || rank > n_items) {
    throw DomainError("rank " + std::to_string(rank) + " outside [1, " + std::to_string(n_items) + "]");
  }
  return std::pow(beta, static_cast<double>(n_items - rank));
}

std::vector<double> click_distribution(std::span<const Stance> item_stances, const RankedList& ranking,
                                       Stance user_stance, const BehaviorParams& params) {
  const std::size_t n = item_stances.size();
  if (ranking.size() != n) {
    throw ValidationError("ranking covers " + std::to_string(ranking.size()) + " items, item set has " +
                          std::to_string(n));
  }
  std::vector<double> dist(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = position_weight(ranking.rank_of(i), n, params.beta) * params.click(item_stances[i], user_stance);
    total += dist[i];
  }
  if (!(total > 0.0)) {
    throw DegenerateModelError("click matrix column for user stance " + std::to_string(user_stance.value()) +
                               " has no mass on any displayed stance");
  }
  for (double& p : dist) p /= total;
  return dist;
}

std::vector<double> click_distribution(std::span<const NewsItem> items, const RankedList& ranking,
                                       Stance user_stance, const BehaviorParams& params) {
  std::vector<Stance> stances;
  stances.reserve(items.size());
  for (const auto& item : items) stances.push_back(item.stance);
  return click_distribution(stances, ranking, user_stance, params);
}

std::size_t sample_click(std::span<const double> dist, Rng& rng) { return sample_categorical(dist, rng); }

bool sample_highlight(Stance news, Stance user, const HighlightMatrix& h, Rng& rng) {
  return rng.bernoulli(h(news, user));
}

double popularity_delta(bool in_group, bool highlighted, const AlgorithmParams& algo) {
  const double engagement = highlighted ? 1.0 + algo.eta : 1.0;
  return in_group ? engagement : (1.0 - algo.lambda) * engagement;
}

void apply_interaction_in_place(PopularityState& state, Stance user_stance, std::size_t clicked_item,
                                bool highlighted, const AlgorithmParams& algo) {
  if (clicked_item >= state.n_items()) {
    throw DomainError("clicked item " + std::to_string(clicked_item) + " outside item set of size " +
                      std::to_string(state.n_items()));
  }
  const UserGroup user_group = group_of(user_stance);
  for (UserGroup g : kAllGroups) {
    state.pop[group_index(g)][clicked_item] += popularity_delta(g == user_group, highlighted, algo);
  }
  ++state.t;
}

PopularityState apply_interaction(PopularityState state, Stance user_stance, std::size_t clicked_item,
                                  bool highlighted, const AlgorithmParams& algo) {
  apply_interaction_in_place(state, user_stance, clicked_item, highlighted, algo);
  return state;
}

RankedList rank_for_group(const PopularityState& state, UserGroup group, const RankedList& previous) {
  const auto& pop = state.of(group);
  if (previous.size() != pop.size()) {
    throw ValidationError("previous ranking size does not match popularity state");
  }
  std::vector<std::size_t> order = previous.order();
  std::stable_sort(order.begin(), order.end(), [&pop](std::size_t a, std::size_t b) { return pop[a] > pop[b]; });
  return RankedList(std::move(order));
}

RankingFeed::RankingFeed(const AlgorithmParams& algo, const RankedList& initial)
    : algo_(algo), state_(initial.size()) {
  algo_.validate();
  rankings_.fill(initial);
}

void RankingFeed::apply(Stance user_stance, std::size_t clicked_item, bool highlighted) {
  apply_interaction_in_place(state_, user_stance, clicked_item, highlighted, algo_);
  for (UserGroup g : kAllGroups) {
    rankings_[group_index(g)] = rank_for_group(state_, g, rankings_[group_index(g)]);
  }
}

}  // namespace ranklab
