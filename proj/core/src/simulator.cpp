#include "ranklab/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ranklab/error.hpp"
#include "ranklab/metrics.hpp"
#include "ranklab/stats.hpp"

namespace ranklab {

void RunConfig::validate() const {
  if (items_per_stance < 1) throw ConfigError("items_per_stance must be >= 1");
  if (n_items != items_per_stance * kNumStances) {
    throw ConfigError("n_items (" + std::to_string(n_items) + ") must equal 5 x items_per_stance (" +
                      std::to_string(items_per_stance) + ")");
  }
  if (window_w < 1) throw ConfigError("window_w must be >= 1");
  try {
    behavior.validate();
    algo.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<EventRecord> RunResult::to_records(const std::string& run_id, const AlgorithmParams& algo) const {
  std::vector<EventRecord> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    EventRecord r;
    r.run_id = run_id;
    r.event = e;
    r.event.scenario = algo;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Stance> item_stances_for(std::size_t items_per_stance) {
  std::vector<Stance> stances;
  for (std::size_t i = 0; i < items_per_stance * kNumStances; ++i) {
    stances.push_back(Stance::from_index(i / items_per_stance));
  }
  return stances;
}

namespace {

RankedList initial_ranking(const RunConfig& config, Rng& rng) {
  config.validate();
  return RankedList::random(config.n_items, rng);
}

struct Draw {
  Stance user;
  std::size_t item;
  bool highlighted;
};

Draw draw_interaction(const RunConfig& config, const std::vector<Stance>& stances, const RankingFeed& feed,
                      Rng& rng) {
  const Stance user = Stance::from_index(sample_categorical(config.behavior.user_stance_dist.probs(), rng));
  const auto dist = click_distribution(stances, feed.ranking(group_of(user)), user, config.behavior);
  const std::size_t item = sample_click(dist, rng);
  const bool highlighted = sample_highlight(stances[item], user, config.behavior.highlight, rng);
  return {user, item, highlighted};
}

// Running sums over the trailing window; stances are integers so the sums
// are exact and match a from-scratch window computation.
class WindowAccumulator {
 public:
  explicit WindowAccumulator(std::size_t w) : w_(w) {}

  void push(Stance clicked, UserGroup group) {
    clicks_.push_back({clicked, group});
    add(clicks_.back(), +1);
    if (clicks_.size() - head_ > w_) add(clicks_[head_++], -1);
  }

  double ext() const { return sum_abs_ / static_cast<double>(clicks_.size() - head_); }
  std::optional<double> pol() const {
    if (n_r_ == 0 || n_l_ == 0) return std::nullopt;
    return sum_r_ / static_cast<double>(n_r_) - sum_l_ / static_cast<double>(n_l_);
  }

 private:
  void add(const ClickObservation& c, int sign) {
    const int v = c.clicked_stance.value();
    sum_abs_ += sign * std::abs(v);
    if (c.user_group == UserGroup::Right) {
      sum_r_ += sign * v;
      n_r_ += sign;
    } else if (c.user_group == UserGroup::Left) {
      sum_l_ += sign * v;
      n_l_ += sign;
    }
  }

  std::size_t w_;
  std::vector<ClickObservation> clicks_;
  std::size_t head_ = 0;
  double sum_abs_ = 0.0, sum_r_ = 0.0, sum_l_ = 0.0;
  long n_r_ = 0, n_l_ = 0;
};

struct LightRun {
  std::vector<double> ext;
  std::vector<std::optional<double>> pol;
  std::optional<double> steady_ext, steady_pol;
};

// Same trajectory as run() without materializing events.
LightRun run_light(const RunConfig& config, bool keep_series) {
  Rng rng(config.seed);
  const RankedList initial = initial_ranking(config, rng);
  const auto stances = item_stances_for(config.items_per_stance);
  RankingFeed feed(config.algo, initial);
  WindowAccumulator window(config.window_w);
  LightRun out;
  const auto [begin, end] = steady_range(config.n_interactions, config.burn_in, config.window_w);
  MetricWindow steady;
  steady.w = config.window_w;
  if (keep_series) {
    out.ext.reserve(config.n_interactions);
    out.pol.reserve(config.n_interactions);
  }
  for (std::size_t t = 0; t < config.n_interactions; ++t) {
    const Draw d = draw_interaction(config, stances, feed, rng);
    feed.apply(d.user, d.item, d.highlighted);
    if (keep_series) {
      window.push(stances[d.item], group_of(d.user));
      out.ext.push_back(window.ext());
      out.pol.push_back(window.pol());
    }
    if (t >= begin && t < end) steady.clicks.push_back({stances[d.item], group_of(d.user)});
  }
  out.steady_ext = try_extremism(steady);
  out.steady_pol = try_polarization(steady);
  return out;
}

}  // namespace

Simulation::Simulation(const RunConfig& config)
    : config_(config),
      rng_(config.seed),
      stances_(item_stances_for(config.items_per_stance)),
      feed_(config.algo, initial_ranking(config_, rng_)) {
  std::vector<std::size_t> per_stance(kNumStances, 0);
  for (std::size_t i = 0; i < stances_.size(); ++i) {
    const Stance s = stances_[i];
    NewsItem item;
    item.id = "item-" + std::to_string(i);
    item.stance = s;
    item.topic = config.topic;
    item.title = std::string(stance_label(s)) + " item " + std::to_string(++per_stance[s.index()]);
    items_.push_back(std::move(item));
  }
}

InteractionEvent Simulation::step() {
  const Draw d = draw_interaction(config_, stances_, feed_, rng_);
  ++seq_;
  const EngagementChoice choice = d.highlighted ? EngagementChoice::Like : EngagementChoice::Nothing;
  InteractionEvent e = make_event(seq_, "agent-" + std::to_string(seq_), config_.topic, d.user, stances_,
                                  feed_.rankings(), d.item, choice, config_.algo);
  feed_.apply(d.user, d.item, d.highlighted);
  return e;
}

std::pair<std::size_t, std::size_t> steady_range(std::size_t n_events, std::size_t burn_in, std::size_t w) {
  const std::size_t begin = std::max(burn_in, n_events > w ? n_events - w : 0);
  return {std::min(begin, n_events), n_events};
}

RunResult run(const RunConfig& config) {
  Simulation sim(config);
  RunResult result;
  result.events.reserve(config.n_interactions);
  WindowAccumulator window(config.window_w);
  for (std::size_t t = 0; t < config.n_interactions; ++t) {
    result.events.push_back(sim.step());
    const auto& e = result.events.back();
    window.push(e.clicked_stance, group_of(e.user_stance));
    result.ext.push_back(window.ext());
    result.pol.push_back(window.pol());
  }
  const auto [begin, end] = steady_range(result.events.size(), config.burn_in, config.window_w);
  const std::span<const InteractionEvent> steady(result.events.data() + begin, end - begin);
  const MetricWindow w = MetricWindow::trailing(steady, steady.size(), config.window_w);
  result.steady_ext = try_extremism(w);
  result.steady_pol = try_polarization(w);
  result.final_state = sim.feed().state();
  result.final_rankings = sim.feed().rankings();
  return result;
}

void SweepConfig::validate() const {
  if (lambda_grid.empty() || eta_grid.empty()) throw ConfigError("sweep grids must be nonempty");
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  for (double l : lambda_grid) AlgorithmParams{0.0, l}.validate();
  for (double e : eta_grid) AlgorithmParams{e, 0.0}.validate();
  base.validate();
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::vector<double> default_eta_grid() { return {0.0, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0}; }

const CellSummary& SweepResult::at(std::size_t lambda_index, std::size_t eta_index) const {
  return cells.at(lambda_index * n_eta + eta_index);
}

std::uint64_t replicate_seed(std::uint64_t base, std::size_t lambda_index, std::size_t eta_index, std::size_t r) {
  return derive_seed(base, {lambda_index, eta_index, r});
}

namespace {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  if (n_threads == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace

SweepResult sweep(const SweepConfig& config, const ProgressFn& progress) {
  config.validate();
  const std::size_t n_l = config.lambda_grid.size();
  const std::size_t n_e = config.eta_grid.size();
  const std::size_t per_cell = config.replicates;
  const std::size_t total = n_l * n_e * per_cell;
  std::vector<ReplicateOutcome> outcomes(total);
  std::atomic<std::size_t> done{0};
  parallel_for(total, config.threads, [&](std::size_t i) {
    const std::size_t cell = i / per_cell;
    const std::size_t r = i % per_cell;
    const std::size_t li = cell / n_e;
    const std::size_t ei = cell % n_e;
    RunConfig rc = config.base;
    rc.algo = AlgorithmParams{config.eta_grid[ei], config.lambda_grid[li]};
    rc.seed = replicate_seed(config.base.seed, li, ei, r);
    try {
      const LightRun lr = run_light(rc, false);
      outcomes[i] = {lr.steady_ext, lr.steady_pol, false};
    } catch (const Error&) {
      outcomes[i].failed = true;
    }
    const std::size_t d = ++done;
    if (progress && (d % per_cell == 0 || d == total)) progress(d, total);
  });

  SweepResult result;
  result.n_eta = n_e;
  for (std::size_t li = 0; li < n_l; ++li) {
    for (std::size_t ei = 0; ei < n_e; ++ei) {
      CellSummary c;
      c.lambda_index = li;
      c.eta_index = ei;
      c.lambda = config.lambda_grid[li];
      c.eta = config.eta_grid[ei];
      c.replicates = per_cell;
      std::vector<double> ext, pol;
      const std::size_t base = (li * n_e + ei) * per_cell;
      for (std::size_t r = 0; r < per_cell; ++r) {
        const auto& o = outcomes[base + r];
        if (o.failed) ++c.failed;
        if (o.steady_ext) ext.push_back(*o.steady_ext);
        if (o.steady_pol) pol.push_back(*o.steady_pol);
        if (config.keep_replicates) c.outcomes.push_back(o);
      }
      c.n_ext = ext.size();
      c.n_pol = pol.size();
      if (!ext.empty()) {
        c.mean_ext = stats::mean(ext);
        c.sd_ext = stats::stddev(ext);
      }
      if (!pol.empty()) {
        c.mean_pol = stats::mean(pol);
        c.sd_pol = stats::stddev(pol);
      }
      result.cells.push_back(std::move(c));
    }
  }
  return result;
}

SweepConfig corner_config(const RunConfig& base, std::size_t replicates, double eta_max) {
  SweepConfig c;
  c.lambda_grid = {0.0, 1.0};
  c.eta_grid = {0.0, eta_max};
  c.replicates = replicates;
  c.base = base;
  return c;
}

ConvergenceProfile convergence_profile(const RunConfig& config, std::size_t replicates, std::size_t horizon,
                                       double rel_tol, unsigned threads) {
  config.validate();
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  const std::size_t n = config.n_interactions;
  std::vector<LightRun> runs(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    RunConfig rc = config;
    rc.seed = derive_seed(config.seed, {r});
    runs[r] = run_light(rc, true);
  });

  ConvergenceProfile profile;
  profile.horizon = horizon;
  profile.rel_tol = rel_tol;
  profile.mean_ext.resize(n);
  profile.sd_ext.resize(n);
  profile.mean_pol.resize(n);
  profile.sd_pol.resize(n);
  std::vector<double> ext, pol;
  for (std::size_t t = 0; t < n; ++t) {
    ext.clear();
    pol.clear();
    for (const auto& r : runs) {
      ext.push_back(r.ext[t]);
      if (r.pol[t]) pol.push_back(*r.pol[t]);
    }
    profile.mean_ext[t] = stats::mean(ext);
    profile.sd_ext[t] = stats::stddev(ext);
    if (!pol.empty()) {
      profile.mean_pol[t] = stats::mean(pol);
      profile.sd_pol[t] = stats::stddev(pol);
    }
  }

  // Metrics of magnitude below this are compared on an absolute scale.
  constexpr double kScaleFloor = 0.5;
  auto stable = [&](auto value_at, std::size_t t) {
    const auto ref = value_at(t);
    if (!ref) return false;
    const double tol = rel_tol * std::max(std::abs(*ref), kScaleFloor);
    for (std::size_t s = t + 1; s <= t + horizon; ++s) {
      const auto v = value_at(s);
      if (!v || std::abs(*v - *ref) >= tol) return false;
    }
    return true;
  };
  auto ext_at = [&](std::size_t i) -> std::optional<double> { return profile.mean_ext[i]; };
  auto pol_at = [&](std::size_t i) { return profile.mean_pol[i]; };
  const std::size_t first = config.window_w > 0 ? config.window_w - 1 : 0;
  for (std::size_t i = first; i + horizon < n; ++i) {
    if (stable(ext_at, i) && stable(pol_at, i)) {
      profile.t_star = i + 1;
      break;
    }
  }
  return profile;
}

}  // namespace ranklab
