#pragma once

// Maximum-likelihood estimation of behavioral parameters from static-ranking
// interaction logs, with user-level bootstrap uncertainty.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranklab/event.hpp"
#include "ranklab/model.hpp"

namespace ranklab {

using OptionalMatrix = std::array<std::array<std::optional<double>, kNumStances>, kNumStances>;

// Estimated parameters; highlight cells without data are missing.
struct ParameterEstimate {
  StanceVector user_stance{};
  double beta = 1.0;
  StanceMatrix click{};
  OptionalMatrix highlight{};

  // Fixed component order: 5 user-stance, 1 beta, 25 click, 25 highlight.
  std::vector<std::optional<double>> flatten() const;
  static ParameterEstimate unflatten(const std::vector<std::optional<double>>& values);

  // Throws ConfigError if a highlight cell is missing.
  BehaviorParams to_behavior() const;
  static ParameterEstimate from_behavior(const BehaviorParams& params);
};

inline constexpr std::size_t kFlatParameterCount = 5 + 1 + 25 + 25;

StanceDistribution estimate_user_stance_dist(const InteractionLog& log);

// Per-cell Bernoulli MLE (highlights + s) / (clicks + 2s).
OptionalMatrix estimate_highlight_matrix(const InteractionLog& log, double smoothing = 0.0);

enum class FitMode { Joint, Sequential };

struct ClickFitOptions {
  double tol = 1e-8;          // relative log-likelihood improvement
  std::size_t max_iter = 500;
  double beta_max = 3.0;
  double beta_tol = 1e-7;     // golden-section bracket width
  FitMode mode = FitMode::Joint;
  std::optional<double> init_beta;
  std::optional<ClickMatrix> init_click;
};

struct ClickFit {
  double beta = 1.0;
  ClickMatrix click = ClickMatrix::uniform();
  double log_likelihood = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool non_identifiable = false;
  std::vector<double> trace;  // log-likelihood after each iteration
  std::vector<std::string> warnings;
};

ClickFit estimate_click_model(const InteractionLog& log, const ClickFitOptions& options = {});

// Straightforward log-likelihood through click_distribution; the fitter's
// fast path must agree with it.
double click_log_likelihood(const InteractionLog& log, double beta, const ClickMatrix& click);

struct EstimateOptions {
  ClickFitOptions click;
  double smoothing = 0.0;
};

struct EstimationResult {
  ParameterEstimate point;
  std::optional<ParameterEstimate> ci_low;
  std::optional<ParameterEstimate> ci_high;
  std::size_t replicates = 0;
  std::size_t skipped = 0;
  double log_likelihood = 0.0;
  std::size_t n_events = 0;
  std::size_t n_users = 0;
  bool non_identifiable = false;
  bool not_converged = false;
  std::vector<std::string> warnings;
};

// Point estimate of every behavioral parameter.
EstimationResult estimate(const InteractionLog& log, const EstimateOptions& options = {});

using Estimator = std::function<ParameterEstimate(const InteractionLog&)>;

Estimator full_estimator(const EstimateOptions& options = {});

// Sessions in order of first appearance.
std::vector<std::string> session_ids(const InteractionLog& log);

// Resamples sessions with replacement. Each drawn copy gets a distinct
// session id so repeated users count as separate users.
InteractionLog resample_users(const InteractionLog& log, Rng& rng);

// Percentile bootstrap (2.5/97.5) over user-level resamples. Replicate r
// uses a generator derived from (seed, r). Failed replicates are skipped;
// more than 10% skipped throws InsufficientDataError. `base` carries the
// full-data fit; when absent the estimator is run on the full log.
EstimationResult bootstrap(const InteractionLog& log, const Estimator& estimator, std::size_t replicates,
                           std::uint64_t seed, std::optional<EstimationResult> base = std::nullopt,
                           unsigned threads = 1);

std::map<std::string, InteractionLog> split_by_topic(const InteractionLog& log);

struct SyntheticLogOptions {
  std::size_t n_users = 432;
  std::size_t tasks_per_user = 4;
  std::size_t items_per_stance = 2;
  std::vector<std::string> topics;  // defaults to task-1..task-k
  std::uint64_t seed = 1;
};

// Static condition: an independently randomized ranking per user and task,
// one click and one highlight decision each.
InteractionLog generate_synthetic_log(const BehaviorParams& params, const SyntheticLogOptions& options);

}  // namespace ranklab
