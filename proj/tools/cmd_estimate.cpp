#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "ranklab/error.hpp"
#include "ranklab/estimation.hpp"
#include "ranklab/event.hpp"
#include "ranklab/presets.hpp"

namespace ranklab::cli {

namespace {

std::vector<std::string> parameter_names() {
  std::vector<std::string> names;
  for (int s = -2; s <= 2; ++s) names.push_back("D[" + std::to_string(s) + "]");
  names.emplace_back("beta");
  for (const char* m : {"C", "H"})
    for (int n = -2; n <= 2; ++n)
      for (int u = -2; u <= 2; ++u) names.push_back(std::string(m) + "[" + std::to_string(n) + "," + std::to_string(u) + "]");
  return names;
}

struct GenOptions {
  std::string params;
  bool per_topic = false;
  std::size_t users = 432;
  std::size_t tasks = 4;
  std::size_t items_per_stance = 2;
};

// One log where each user answers every topic once; a topic's events use
// that topic's parameters.
InteractionLog per_topic_log(const std::vector<std::pair<std::string, BehaviorParams>>& table,
                             const GenOptions& o, std::uint64_t seed) {
  std::vector<InteractionLog> parts;
  for (std::size_t k = 0; k < table.size(); ++k) {
    SyntheticLogOptions so;
    so.n_users = o.users;
    so.tasks_per_user = 1;
    so.items_per_stance = o.items_per_stance;
    so.topics = {table[k].first};
    so.seed = derive_seed(seed, {k});
    parts.push_back(generate_synthetic_log(table[k].second, so));
  }
  InteractionLog log;
  std::uint64_t seq = 0;
  for (std::size_t u = 0; u < o.users; ++u) {
    for (auto& part : parts) {
      EventRecord r = part.records[u];
      r.event.seq = ++seq;
      log.records.push_back(std::move(r));
    }
  }
  return log;
}

}  // namespace

void add_gen_synthetic(CLI::App& root, Common& common, Action& action) {
  auto* app = root.add_subcommand("gen-synthetic", "Generate a static-ranking interaction log from known parameters");
  auto o = std::make_shared<GenOptions>();
  app->add_option("--params", o->params, "Parameters file (default: built-in presets)");
  app->add_flag("--per-topic", o->per_topic, "Use each topic's parameters for its own task");
  app->add_option("--users", o->users, "Number of users")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--tasks", o->tasks, "Tasks per user (pooled mode)")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--items-per-stance", o->items_per_stance, "Items per stance")->capture_default_str();
  app->callback([&common, &action, o]() {
    action = [&common, o]() {
      InteractionLog log;
      std::vector<std::filesystem::path> inputs;
      if (!o->params.empty()) inputs.emplace_back(o->params);
      if (o->per_topic) {
        auto table = behavior_table(o->params);
        if (o->params.empty()) table.erase(table.begin());  // drop the pooled preset
        log = per_topic_log(table, *o, common.seed);
      } else {
        SyntheticLogOptions so;
        so.n_users = o->users;
        so.tasks_per_user = o->tasks;
        so.items_per_stance = o->items_per_stance;
        so.seed = common.seed;
        if (o->tasks <= presets::topic_names().size()) {
          so.topics.assign(presets::topic_names().begin(), presets::topic_names().begin() + static_cast<long>(o->tasks));
        }
        log = generate_synthetic_log(resolve_behavior(o->params, "pooled"), so);
      }
      const auto dir = common.out_dir();
      write_event_log(dir / "synthetic.jsonl", log);
      write_manifest(dir, "gen-synthetic", common, inputs, {"synthetic.jsonl"});
      std::cout << "wrote " << log.size() << " events to " << (dir / "synthetic.jsonl").string() << '\n';
    };
  });
}

struct EstimateArgs {
  std::string log_path;
  bool per_topic = false;
  bool pooled = false;
  std::size_t bootstrap = 1000;
  CLI::Option* bootstrap_opt = nullptr;
  double smoothing = 0.0;
};

void add_estimate(CLI::App& root, Common& common, Action& action) {
  auto* app = root.add_subcommand("estimate", "Fit behavioral parameters to a static-ranking log");
  auto o = std::make_shared<EstimateArgs>();
  app->add_option("log", o->log_path, "Event log (JSON Lines)")->required();
  auto* per = app->add_flag("--per-topic", o->per_topic, "Fit each topic separately");
  auto* pooled = app->add_flag("--pooled", o->pooled, "Fit all topics together (default)");
  per->excludes(pooled);
  o->bootstrap_opt = app->add_option("--bootstrap", o->bootstrap, "Bootstrap replicates (0 disables)")
                         ->capture_default_str();
  app->add_option("--smoothing", o->smoothing, "Additive smoothing of highlight cells")->capture_default_str();
  app->callback([&common, &action, o]() {
    action = [&common, o]() {
      const std::size_t replicates = common.pick<std::size_t>(o->bootstrap_opt, o->bootstrap, "bootstrap", 1000);
      const bool per_topic = o->per_topic || (!o->pooled && common.config.value("per_topic", false));
      const InteractionLog log = read_event_log(o->log_path);
      if (log.empty()) throw InsufficientDataError(o->log_path + ": event log is empty");

      std::map<std::string, InteractionLog> parts;
      if (per_topic) {
        parts = split_by_topic(log);
      } else {
        parts.emplace("pooled", log);
      }

      ranklab::EstimateOptions eo;
      eo.smoothing = o->smoothing;
      ParamsFile file;
      file.mode = per_topic ? "per_topic" : "pooled";
      std::size_t k = 0;
      for (const auto& [topic, part] : parts) {
        EstimationResult r = estimate(part, eo);
        if (replicates > 0) {
          ranklab::EstimateOptions warm = eo;
          warm.click.init_beta = r.point.beta;
          warm.click.init_click = ClickMatrix(r.point.click);
          r = bootstrap(part, full_estimator(warm), replicates, derive_seed(common.seed, {k}), r);
        }
        file.topics.emplace(topic, std::move(r));
        ++k;
      }

      const auto dir = common.out_dir();
      write_params_file(dir / "params.json", file);
      std::ofstream csv(dir / "estimate_ci.csv");
      csv << "topic,parameter,estimate,ci_low,ci_high\n";
      const auto names = parameter_names();
      for (const auto& [topic, r] : file.topics) {
        const auto point = r.point.flatten();
        const auto lo = r.ci_low ? r.ci_low->flatten() : std::vector<std::optional<double>>(names.size());
        const auto hi = r.ci_high ? r.ci_high->flatten() : std::vector<std::optional<double>>(names.size());
        for (std::size_t i = 0; i < names.size(); ++i) {
          csv << topic << ",\"" << names[i] << "\"," << num(point[i]) << ',' << num(lo[i]) << ',' << num(hi[i]) << '\n';
        }
      }
      write_manifest(dir, "estimate", common, {o->log_path}, {"params.json", "estimate_ci.csv"});

      for (const auto& [topic, r] : file.topics) {
        std::cout << topic << ": " << r.n_events << " events, " << r.n_users << " users, log-likelihood "
                  << num(r.log_likelihood, 3) << '\n';
        std::cout << "  beta " << num(r.point.beta, 4);
        if (r.ci_low) std::cout << "  [" << num(r.ci_low->beta, 4) << ", " << num(r.ci_high->beta, 4) << "]";
        std::cout << "\n  D   ";
        for (double d : r.point.user_stance) std::cout << ' ' << num(d, 3);
        std::cout << "\n  marginal highlight";
        for (std::size_t u = 0; u < kNumStances; ++u) {
          double m = 0.0;
          bool missing = false;
          for (std::size_t n = 0; n < kNumStances; ++n) {
            if (!r.point.highlight[n][u]) {
              missing = true;
              continue;
            }
            m += r.point.click[n][u] * *r.point.highlight[n][u];
          }
          std::cout << ' ' << (missing ? "NA" : num(m, 3));
        }
        std::cout << '\n';
        if (r.replicates > 0) std::cout << "  bootstrap " << r.replicates << " replicates, " << r.skipped << " skipped\n";
        for (const auto& w : r.warnings) std::cerr << "warning: " << topic << ": " << w << '\n';
      }
      std::cout << "wrote " << (dir / "params.json").string() << '\n';
    };
  });
}

}  // namespace ranklab::cli
