#pragma once

// Monte-Carlo engine: users arrive one at a time, click on the ranking of
// their group, optionally highlight, and every group's ranking is re-sorted
// after each interaction.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ranklab/event.hpp"
#include "ranklab/model.hpp"

namespace ranklab {

struct RunConfig {
  BehaviorParams behavior;
  AlgorithmParams algo;
  std::size_t n_items = 10;
  std::size_t items_per_stance = 2;
  std::size_t n_interactions = 500;
  std::size_t window_w = 200;
  std::size_t burn_in = 50;
  std::uint64_t seed = 1;
  std::string topic = "pooled";
  std::string run_id = "sim";

  // Throws ConfigError for inconsistent sizes or invalid parameters.
  void validate() const;
  // Whether n_interactions leaves a full window after burn-in.
  bool has_steady_window() const { return n_interactions > burn_in + window_w; }
};

struct RunResult {
  std::vector<InteractionEvent> events;
  // Windowed metrics after each interaction t = 1..n (partial windows while
  // fewer than w clicks exist).
  std::vector<double> ext;
  std::vector<std::optional<double>> pol;
  std::optional<double> steady_ext;
  std::optional<double> steady_pol;
  PopularityState final_state;
  std::array<RankedList, kNumGroups> final_rankings;

  std::vector<EventRecord> to_records(const std::string& run_id, const AlgorithmParams& algo) const;
};

std::vector<Stance> item_stances_for(std::size_t items_per_stance);

// Item set with `items_per_stance` per stance, zero popularity, and one
// seeded random permutation shared by all groups.
class Simulation {
 public:
  explicit Simulation(const RunConfig& config);

  const std::vector<NewsItem>& items() const { return items_; }
  const std::vector<Stance>& item_stances() const { return stances_; }
  const RankingFeed& feed() const { return feed_; }

  InteractionEvent step();

 private:
  RunConfig config_;
  Rng rng_;
  std::vector<NewsItem> items_;
  std::vector<Stance> stances_;
  RankingFeed feed_;
  std::uint64_t seq_ = 0;
};

// Events [begin, end) that enter steady-state metrics: the last w events
// after discarding burn_in.
std::pair<std::size_t, std::size_t> steady_range(std::size_t n_events, std::size_t burn_in, std::size_t w);

RunResult run(const RunConfig& config);

struct SweepConfig {
  std::vector<double> lambda_grid;
  std::vector<double> eta_grid;
  std::size_t replicates = 1000;
  RunConfig base;
  unsigned threads = 1;
  bool keep_replicates = false;

  void validate() const;
};

std::vector<double> default_lambda_grid();
std::vector<double> default_eta_grid();

struct ReplicateOutcome {
  std::optional<double> steady_ext;
  std::optional<double> steady_pol;
  bool failed = false;
};

struct CellSummary {
  std::size_t lambda_index = 0;
  std::size_t eta_index = 0;
  double lambda = 0.0;
  double eta = 0.0;
  std::size_t replicates = 0;
  std::size_t failed = 0;
  std::size_t n_ext = 0;
  std::size_t n_pol = 0;
  std::optional<double> mean_ext, sd_ext;
  std::optional<double> mean_pol, sd_pol;
  std::vector<ReplicateOutcome> outcomes;  // filled when keep_replicates
};

struct SweepResult {
  std::vector<CellSummary> cells;  // lambda-major order

  const CellSummary& at(std::size_t lambda_index, std::size_t eta_index) const;
  std::size_t n_eta = 0;
};

// Seed of replicate r in cell (li, ei).
std::uint64_t replicate_seed(std::uint64_t base, std::size_t lambda_index, std::size_t eta_index, std::size_t r);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

SweepResult sweep(const SweepConfig& config, const ProgressFn& progress = {});

// The four (lambda, eta) corners: (0,0), (0,100), (1,0), (1,100).
SweepConfig corner_config(const RunConfig& base, std::size_t replicates, double eta_max = 100.0);

struct ConvergenceProfile {
  std::vector<double> mean_ext, sd_ext;
  std::vector<std::optional<double>> mean_pol, sd_pol;
  std::optional<std::size_t> t_star;  // 1-based interaction count
  std::size_t horizon = 200;
  double rel_tol = 0.05;
};

// Ensemble-mean windowed metrics over `replicates` runs; t* is the smallest
// t >= w at which both ensemble means stay within rel_tol of their value at t
// over the next `horizon` steps.
ConvergenceProfile convergence_profile(const RunConfig& config, std::size_t replicates, std::size_t horizon = 200,
                                       double rel_tol = 0.05, unsigned threads = 1);

}  // namespace ranklab
