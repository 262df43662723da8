#include "ranklab/estimation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <thread>
#include <unordered_map>
#include <utility>

#include "ranklab/error.hpp"
#include "ranklab/stats.hpp"

namespace ranklab {

// ---------------------------------------------------------------------------
// ParameterEstimate

std::vector<std::optional<double>> ParameterEstimate::flatten() const {
  std::vector<std::optional<double>> out;
  out.reserve(kFlatParameterCount);
  for (double p : user_stance) out.emplace_back(p);
  out.emplace_back(beta);
  for (const auto& row : click)
    for (double c : row) out.emplace_back(c);
  for (const auto& row : highlight)
    for (const auto& h : row) out.push_back(h);
  return out;
}

ParameterEstimate ParameterEstimate::unflatten(const std::vector<std::optional<double>>& values) {
  if (values.size() != kFlatParameterCount) throw ValidationError("flattened parameter vector has the wrong size");
  ParameterEstimate p;
  std::size_t i = 0;
  auto take = [&]() { return values[i++].value_or(std::numeric_limits<double>::quiet_NaN()); };
  for (double& v : p.user_stance) v = take();
  p.beta = take();
  for (auto& row : p.click)
    for (double& c : row) c = take();
  for (auto& row : p.highlight)
    for (auto& h : row) h = values[i++];
  return p;
}

BehaviorParams ParameterEstimate::to_behavior() const {
  StanceMatrix h{};
  for (std::size_t n = 0; n < kNumStances; ++n) {
    for (std::size_t u = 0; u < kNumStances; ++u) {
      if (!highlight[n][u]) {
        throw ConfigError("highlight cell (news " + std::to_string(int(n) - 2) + ", user " +
                          std::to_string(int(u) - 2) + ") is missing; re-estimate with smoothing > 0");
      }
      h[n][u] = *highlight[n][u];
    }
  }
  BehaviorParams b{StanceDistribution(user_stance), beta, ClickMatrix(click), HighlightMatrix(h)};
  b.validate();
  return b;
}

ParameterEstimate ParameterEstimate::from_behavior(const BehaviorParams& params) {
  ParameterEstimate p;
  p.user_stance = params.user_stance_dist.probs();
  p.beta = params.beta;
  p.click = params.click.values();
  for (std::size_t n = 0; n < kNumStances; ++n)
    for (std::size_t u = 0; u < kNumStances; ++u) p.highlight[n][u] = params.highlight.values()[n][u];
  return p;
}

// ---------------------------------------------------------------------------
// Stance distribution and highlight matrix

StanceDistribution estimate_user_stance_dist(const InteractionLog& log) {
  if (log.empty()) throw InsufficientDataError("cannot estimate the user-stance distribution from an empty log");
  // One stance report per (session, topic) task.
  std::set<std::pair<std::string, std::string>> seen;
  std::array<double, kNumStances> counts{};
  double total = 0.0;
  for (const auto& r : log.records) {
    if (!seen.emplace(r.event.session, r.event.topic).second) continue;
    counts[r.event.user_stance.index()] += 1.0;
    total += 1.0;
  }
  StanceVector probs{};
  for (std::size_t s = 0; s < kNumStances; ++s) probs[s] = counts[s] / total;
  // Renormalize so rounding never trips the simplex check.
  double sum = 0.0;
  for (double p : probs) sum += p;
  for (double& p : probs) p /= sum;
  return StanceDistribution(probs);
}

OptionalMatrix estimate_highlight_matrix(const InteractionLog& log, double smoothing) {
  if (smoothing < 0.0) throw ValidationError("smoothing must be >= 0");
  std::array<std::array<double, kNumStances>, kNumStances> clicks{}, highlights{};
  for (const auto& r : log.records) {
    const auto n = r.event.clicked_stance.index();
    const auto u = r.event.user_stance.index();
    clicks[n][u] += 1.0;
    if (r.event.highlighted) highlights[n][u] += 1.0;
  }
  OptionalMatrix out{};
  for (std::size_t n = 0; n < kNumStances; ++n) {
    for (std::size_t u = 0; u < kNumStances; ++u) {
      const double denom = clicks[n][u] + 2.0 * smoothing;
      if (denom > 0.0) out[n][u] = (highlights[n][u] + smoothing) / denom;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Click model

namespace {

// Events reduced to what the click likelihood needs. Exponent j of an item
// is N - rank, so position weight is beta^j.
class ClickData {
 public:
  explicit ClickData(const InteractionLog& log) {
    events_.reserve(log.size());
    for (const auto& r : log.records) {
      const auto& e = r.event;
      const std::size_t n = e.item_stances.size();
      Compact c;
      c.user = static_cast<std::uint8_t>(e.user_stance.index());
      c.clicked = static_cast<std::uint8_t>(e.clicked_stance.index());
      c.j_click = static_cast<std::uint32_t>(n - e.clicked_rank);
      c.offset = static_cast<std::uint32_t>(stances_.size());
      c.n = static_cast<std::uint32_t>(n);
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t rank = n - j;
        stances_.push_back(static_cast<std::uint8_t>(e.item_stances[e.displayed.item_at(rank)].index()));
      }
      max_n_ = std::max(max_n_, n);
      sum_j_ += c.j_click;
      events_.push_back(c);
      user_counts_[c.user] += 1;
    }
    powers_.resize(max_n_);
    coeff_.resize(stances_.size());
  }

  std::size_t size() const { return events_.size(); }
  std::size_t user_count(std::size_t u) const { return user_counts_[u]; }

  bool identifiable() const {
    if (events_.size() < 2) return false;
    std::set<std::vector<std::uint8_t>> patterns;
    for (const auto& c : events_) {
      patterns.emplace(stances_.begin() + c.offset, stances_.begin() + c.offset + c.n);
      if (patterns.size() >= 2) return true;
    }
    return false;
  }

  double log_likelihood(double beta, const StanceMatrix& click) {
    prepare_coefficients(click);
    return beta_objective(beta) + constant_term(click);
  }

  // Sum over events of log C[k_e, u_e]; independent of beta.
  double constant_term(const StanceMatrix& click) const {
    double s = 0.0;
    for (const auto& c : events_) s += std::log(click[c.clicked][c.user]);
    return s;
  }

  void prepare_coefficients(const StanceMatrix& click) {
    for (const auto& c : events_) {
      for (std::uint32_t j = 0; j < c.n; ++j) coeff_[c.offset + j] = click[stances_[c.offset + j]][c.user];
    }
  }

  // Beta-dependent part of the log-likelihood for the prepared coefficients.
  double beta_objective(double beta) const {
    double prod = 1.0;
    long exponent_sum = 0;
    std::size_t pending = 0;
    for (const auto& c : events_) {
      const double* a = coeff_.data() + c.offset;
      double z = a[c.n - 1];
      for (std::uint32_t j = c.n - 1; j > 0; --j) z = z * beta + a[j - 1];
      prod *= z;
      if (++pending == 16) {
        int e = 0;
        prod = std::frexp(prod, &e);
        exponent_sum += e;
        pending = 0;
      }
    }
    const double log_norm = std::log(prod) + static_cast<double>(exponent_sum) * std::log(2.0);
    return static_cast<double>(sum_j_) * std::log(beta) - log_norm;
  }

  // One minorize-maximize update of every observed column of C.
  void mm_update(double beta, StanceMatrix& click) {
    fill_powers(beta);
    std::array<std::array<double, kNumStances>, kNumStances> denom{};
    std::array<std::array<double, kNumStances>, kNumStances> counts{};
    for (const auto& c : events_) {
      std::array<double, kNumStances> mass{};
      for (std::uint32_t j = 0; j < c.n; ++j) mass[stances_[c.offset + j]] += powers_[j];
      double z = 0.0;
      for (std::size_t k = 0; k < kNumStances; ++k) z += mass[k] * click[k][c.user];
      for (std::size_t k = 0; k < kNumStances; ++k) denom[k][c.user] += mass[k] / z;
      counts[c.clicked][c.user] += 1.0;
    }
    for (std::size_t u = 0; u < kNumStances; ++u) {
      if (user_counts_[u] == 0) continue;
      double sum = 0.0;
      std::array<double, kNumStances> col{};
      for (std::size_t k = 0; k < kNumStances; ++k) {
        col[k] = denom[k][u] > 0.0 ? counts[k][u] / denom[k][u] : 0.0;
        sum += col[k];
      }
      for (std::size_t k = 0; k < kNumStances; ++k) click[k][u] = col[k] / sum;
    }
  }

 private:
  struct Compact {
    std::uint8_t user = 0;
    std::uint8_t clicked = 0;
    std::uint32_t j_click = 0;
    std::uint32_t offset = 0;
    std::uint32_t n = 0;
  };

  void fill_powers(double beta) {
    double p = 1.0;
    for (auto& v : powers_) {
      v = p;
      p *= beta;
    }
  }

  std::vector<Compact> events_;
  std::vector<std::uint8_t> stances_;
  std::vector<double> powers_;
  std::vector<double> coeff_;
  std::array<std::size_t, kNumStances> user_counts_{};
  std::size_t max_n_ = 0;
  std::uint64_t sum_j_ = 0;
};

// Maximizes a unimodal f on [lo, hi] starting from x0: expand a bracket
// around x0, then golden-section within it. Never returns a point worse
// than x0.
template <class F>
std::pair<double, double> golden_maximize(F&& f, double lo, double hi, double x0, double tol) {
  const double f0 = f(x0);
  double step = std::max(10.0 * tol, 1e-3);
  double a = std::max(lo, x0 - step);
  double b = std::min(hi, x0 + step);
  double fa = f(a);
  double fb = f(b);
  if (fb > f0) {
    double prev = x0;
    double cur = b, fcur = fb;
    while (cur < hi) {
      step *= 2.0;
      const double next = std::min(hi, cur + step);
      const double fnext = f(next);
      if (fnext < fcur) {
        a = prev;
        b = next;
        break;
      }
      prev = cur;
      cur = next;
      fcur = fnext;
      a = prev;
      b = cur;
    }
  } else if (fa > f0) {
    double prev = x0;
    double cur = a, fcur = fa;
    while (cur > lo) {
      step *= 2.0;
      const double next = std::max(lo, cur - step);
      const double fnext = f(next);
      if (fnext < fcur) {
        a = next;
        b = prev;
        break;
      }
      prev = cur;
      cur = next;
      fcur = fnext;
      a = cur;
      b = prev;
    }
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double best = fc >= fd ? c : d;
  double fbest = std::max(fc, fd);
  if (f0 >= fbest) return {x0, f0};
  return {best, fbest};
}

}  // namespace

double click_log_likelihood(const InteractionLog& log, double beta, const ClickMatrix& click) {
  BehaviorParams params;
  params.beta = beta;
  params.click = click;
  double ll = 0.0;
  for (const auto& r : log.records) {
    const auto& e = r.event;
    const auto dist = click_distribution(e.item_stances, e.displayed, e.user_stance, params);
    ll += std::log(dist[e.clicked_item]);
  }
  return ll;
}

ClickFit estimate_click_model(const InteractionLog& log, const ClickFitOptions& options) {
  if (options.beta_max <= 1.0) throw ValidationError("beta_max must exceed 1");
  ClickFit fit;
  if (log.empty()) throw InsufficientDataError("cannot fit the click model to an empty log");
  ClickData data(log);
  fit.non_identifiable = !data.identifiable();
  if (fit.non_identifiable) {
    fit.warnings.emplace_back("non-identifiable: all events share one displayed stance ordering");
  }
  for (std::size_t u = 0; u < kNumStances; ++u) {
    if (data.user_count(u) == 0) {
      fit.warnings.push_back("no events for user stance " + std::to_string(int(u) - 2) + "; column left at its initial value");
    }
  }

  double beta = std::clamp(options.init_beta.value_or(1.0), 1.0, options.beta_max);
  StanceMatrix click = options.init_click ? options.init_click->values() : ClickMatrix::uniform().values();

  auto beta_step = [&]() {
    data.prepare_coefficients(click);
    auto result = golden_maximize([&](double b) { return data.beta_objective(b); }, 1.0, options.beta_max, beta,
                                  options.beta_tol);
    beta = result.first;
  };

  if (options.mode == FitMode::Sequential) {
    // Randomized rankings make the stance composition independent of
    // position, so beta is fit first against a uniform click matrix.
    const StanceMatrix saved = click;
    click = ClickMatrix::uniform().values();
    beta_step();
    click = saved;
  }

  double ll = data.log_likelihood(beta, click);
  fit.trace.push_back(ll);
  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    data.mm_update(beta, click);
    if (options.mode == FitMode::Joint) beta_step();
    const double next = data.log_likelihood(beta, click);
    fit.trace.push_back(next);
    fit.iterations = iter;
    if (next < ll - 1e-12 * std::abs(ll)) {
      fit.warnings.push_back("log-likelihood decreased at iteration " + std::to_string(iter));
    }
    const double improvement = (next - ll) / std::max(std::abs(ll), 1e-300);
    ll = next;
    if (improvement < options.tol) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) fit.warnings.push_back("click model did not converge within max_iter");
  fit.beta = beta;
  fit.click = ClickMatrix(click);
  fit.log_likelihood = ll;
  return fit;
}

// ---------------------------------------------------------------------------
// Full estimate and bootstrap

EstimationResult estimate(const InteractionLog& log, const EstimateOptions& options) {
  EstimationResult result;
  const auto dist = estimate_user_stance_dist(log);
  const ClickFit fit = estimate_click_model(log, options.click);
  result.point.user_stance = dist.probs();
  result.point.beta = fit.beta;
  result.point.click = fit.click.values();
  result.point.highlight = estimate_highlight_matrix(log, options.smoothing);
  result.log_likelihood = fit.log_likelihood;
  result.non_identifiable = fit.non_identifiable;
  result.not_converged = !fit.converged;
  result.warnings = fit.warnings;
  result.n_events = log.size();
  result.n_users = session_ids(log).size();
  return result;
}

Estimator full_estimator(const EstimateOptions& options) {
  return [options](const InteractionLog& log) { return estimate(log, options).point; };
}

std::vector<std::string> session_ids(const InteractionLog& log) {
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& r : log.records) {
    if (seen.emplace(r.event.session, ids.size()).second) ids.push_back(r.event.session);
  }
  return ids;
}

InteractionLog resample_users(const InteractionLog& log, Rng& rng) {
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<const EventRecord*>> by_user;
  for (const auto& r : log.records) {
    auto [it, inserted] = index.emplace(r.event.session, by_user.size());
    if (inserted) by_user.emplace_back();
    by_user[it->second].push_back(&r);
  }
  InteractionLog out;
  out.records.reserve(log.size());
  const std::size_t n = by_user.size();
  for (std::size_t draw = 0; draw < n; ++draw) {
    const auto& user = by_user[rng.below(n)];
    for (const EventRecord* r : user) {
      EventRecord copy = *r;
      copy.event.session += "#" + std::to_string(draw);
      out.records.push_back(std::move(copy));
    }
  }
  return out;
}

EstimationResult bootstrap(const InteractionLog& log, const Estimator& estimator, std::size_t replicates,
                           std::uint64_t seed, std::optional<EstimationResult> base, unsigned threads) {
  if (replicates < 1) throw ValidationError("bootstrap needs at least one replicate");
  EstimationResult result;
  if (base) {
    result = std::move(*base);
  } else {
    result.point = estimator(log);
    result.n_events = log.size();
    result.n_users = session_ids(log).size();
  }

  std::vector<std::optional<std::vector<std::optional<double>>>> samples(replicates);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t r = next++; r < replicates; r = next++) {
      Rng rng(derive_seed(seed, {r}));
      try {
        const InteractionLog resampled = resample_users(log, rng);
        samples[r] = estimator(resampled).flatten();
      } catch (const Error&) {
        samples[r].reset();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(replicates)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::size_t skipped = 0;
  for (const auto& s : samples) skipped += s ? 0 : 1;
  if (skipped * 10 > replicates) {
    throw InsufficientDataError("bootstrap failed in " + std::to_string(skipped) + " of " +
                                std::to_string(replicates) + " replicates");
  }

  std::vector<std::optional<double>> low(kFlatParameterCount), high(kFlatParameterCount);
  for (std::size_t i = 0; i < kFlatParameterCount; ++i) {
    std::vector<double> values;
    values.reserve(replicates);
    for (const auto& s : samples) {
      if (s && (*s)[i]) values.push_back(*(*s)[i]);
    }
    if (values.empty()) continue;
    low[i] = stats::percentile(values, 0.025);
    high[i] = stats::percentile(std::move(values), 0.975);
  }
  result.ci_low = ParameterEstimate::unflatten(low);
  result.ci_high = ParameterEstimate::unflatten(high);
  result.replicates = replicates;
  result.skipped = skipped;

  const auto point = result.point.flatten();
  std::size_t outside = 0;
  for (std::size_t i = 0; i < kFlatParameterCount; ++i) {
    if (point[i] && low[i] && high[i] && (*point[i] < *low[i] - 1e-12 || *point[i] > *high[i] + 1e-12)) ++outside;
  }
  if (outside > 0) {
    result.warnings.push_back(std::to_string(outside) + " point estimates fall outside their bootstrap interval");
  }
  if (replicates == 1) result.warnings.emplace_back("a single bootstrap replicate gives a degenerate interval");
  return result;
}

std::map<std::string, InteractionLog> split_by_topic(const InteractionLog& log) {
  std::map<std::string, InteractionLog> out;
  for (const auto& r : log.records) out[r.event.topic].records.push_back(r);
  return out;
}

InteractionLog generate_synthetic_log(const BehaviorParams& params, const SyntheticLogOptions& options) {
  params.validate();
  if (options.items_per_stance < 1) throw ValidationError("items_per_stance must be >= 1");
  std::vector<std::string> topics = options.topics;
  if (topics.empty()) {
    for (std::size_t t = 0; t < options.tasks_per_user; ++t) topics.push_back("task-" + std::to_string(t + 1));
  }
  if (topics.size() < options.tasks_per_user) throw ValidationError("fewer topics than tasks per user");

  const std::size_t n_items = options.items_per_stance * kNumStances;
  std::vector<Stance> stances;
  for (std::size_t i = 0; i < n_items; ++i) stances.push_back(Stance::from_index(i / options.items_per_stance));

  Rng rng(options.seed);
  InteractionLog log;
  log.records.reserve(options.n_users * options.tasks_per_user);
  std::uint64_t seq = 0;
  for (std::size_t user = 0; user < options.n_users; ++user) {
    const std::string session = "u" + std::to_string(user + 1);
    for (std::size_t task = 0; task < options.tasks_per_user; ++task) {
      const Stance user_stance = Stance::from_index(sample_categorical(params.user_stance_dist.probs(), rng));
      const RankedList ranking = RankedList::random(n_items, rng);
      const auto dist = click_distribution(stances, ranking, user_stance, params);
      const std::size_t item = sample_click(dist, rng);
      const bool highlighted = sample_highlight(stances[item], user_stance, params.highlight, rng);
      EngagementChoice choice = EngagementChoice::Nothing;
      if (highlighted) {
        static constexpr std::array<EngagementChoice, 3> kChoices = {EngagementChoice::Like, EngagementChoice::Share,
                                                                     EngagementChoice::LikeAndShare};
        choice = kChoices[rng.below(3)];
      }
      std::array<RankedList, kNumGroups> shown;
      shown.fill(ranking);
      EventRecord record;
      record.run_id = "static";
      record.event = make_event(++seq, session, topics[task], user_stance, stances, shown, item, choice, std::nullopt);
      log.records.push_back(std::move(record));
    }
  }
  return log;
}

}  // namespace ranklab
