#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "commands.hpp"
#include "ranklab/error.hpp"
#include "ranklab/event.hpp"
#include "ranklab/simulator.hpp"

namespace ranklab::cli {

namespace {

struct SimArgs {
  std::string params;
  std::string topic;
  double lambda = 0.0;
  double eta = 0.0;
  std::size_t runs = 1;
  std::size_t interactions = 500;
  std::size_t items_per_stance = 2;
  bool emit_plot_data = false;
  CLI::Option* runs_opt = nullptr;
  CLI::Option* interactions_opt = nullptr;
};

struct SweepArgs {
  std::string params;
  std::string topic;
  std::string grid_lambda;
  std::string grid_eta;
  std::size_t replicates = 1000;
  std::size_t interactions = 500;
  double eta_max = 100.0;
  unsigned threads = 0;
  bool no_corners = false;
  bool emit_plot_data = false;
  CLI::Option* grid_lambda_opt = nullptr;
  CLI::Option* grid_eta_opt = nullptr;
  CLI::Option* replicates_opt = nullptr;
  CLI::Option* interactions_opt = nullptr;
};

RunConfig base_config(const Common& common, const BehaviorParams& behavior, std::size_t interactions) {
  RunConfig c;
  c.behavior = behavior;
  c.n_interactions = interactions;
  c.window_w = common.window;
  c.burn_in = common.burn_in;
  c.seed = common.seed;
  return c;
}

std::vector<double> grid_from(const Common& common, const CLI::Option* opt, const std::string& flag_value,
                              const char* key, const char* flag, std::vector<double> fallback) {
  if (opt && opt->count() > 0) return parse_grid(flag_value, flag);
  if (common.config.contains(key)) {
    auto v = common.config[key].get<std::vector<double>>();
    if (v.empty()) throw ConfigError(std::string(key) + " must not be empty");
    return v;
  }
  return fallback;
}

double se_of(const std::optional<double>& sd, std::size_t n) {
  if (!sd || n == 0) return std::nan("");
  return *sd / std::sqrt(static_cast<double>(n));
}

void write_cell_stats(std::ostream& out, const CellSummary& c) {
  const double se_ext = se_of(c.sd_ext, c.n_ext);
  const double se_pol = se_of(c.sd_pol, c.n_pol);
  out << c.replicates << ',' << c.failed << ',' << c.n_ext << ',' << num(c.mean_ext) << ',' << num(c.sd_ext) << ','
      << num(se_ext) << ',' << c.n_pol << ',' << num(c.mean_pol) << ',' << num(c.sd_pol) << ',' << num(se_pol);
}

constexpr const char* kCellHeader = "replicates,failed,n_ext,mean_ext,sd_ext,se_ext,n_pol,mean_pol,sd_pol,se_pol";

void write_plot_rows(std::ostream& out, const std::string& topic, const CellSummary& c) {
  for (std::size_t r = 0; r < c.outcomes.size(); ++r) {
    const auto& o = c.outcomes[r];
    out << topic << ',' << num(c.lambda) << ',' << num(c.eta) << ',' << r << ",ext," << num(o.steady_ext) << '\n';
    out << topic << ',' << num(c.lambda) << ',' << num(c.eta) << ',' << r << ",pol," << num(o.steady_pol) << '\n';
  }
}

ProgressFn progress_reporter(const std::string& label) {
  auto last = std::make_shared<std::size_t>(0);
  return [label, last](std::size_t done, std::size_t total) {
    const std::size_t pct = total ? done * 100 / total : 100;
    if (pct >= *last + 10 || done == total) {
      *last = pct;
      std::cerr << label << ": " << done << "/" << total << " runs (" << pct << "%)\n";
    }
  };
}

}  // namespace

void add_simulate(CLI::App& root, Common& common, Action& action) {
  auto* app = root.add_subcommand("simulate", "Simulate runs of the feedback loop and write their event logs");
  auto o = std::make_shared<SimArgs>();
  app->add_option("--params", o->params, "Parameters file (default: built-in presets)");
  app->add_option("--topic", o->topic, "Topic entry of the parameters file or preset name");
  app->add_option("--lambda", o->lambda, "Personalization degree")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  app->add_option("--eta", o->eta, "Active-engagement reward")->capture_default_str()->check(CLI::NonNegativeNumber);
  o->runs_opt = app->add_option("--runs", o->runs, "Independent runs")->capture_default_str()->check(CLI::PositiveNumber);
  o->interactions_opt = app->add_option("--interactions", o->interactions, "Interactions per run")->capture_default_str();
  app->add_option("--items-per-stance", o->items_per_stance, "Items per stance")->capture_default_str();
  app->add_flag("--emit-plot-data", o->emit_plot_data, "Write per-step metric series in long format");
  app->callback([&common, &action, o]() {
    action = [&common, o]() {
      const std::size_t runs = common.pick<std::size_t>(o->runs_opt, o->runs, "runs", 1);
      const std::size_t interactions =
          common.pick<std::size_t>(o->interactions_opt, o->interactions, "n_interactions", 500);
      const std::string topic = o->topic.empty() ? common.config.value("topic", std::string()) : o->topic;
      RunConfig config = base_config(common, resolve_behavior(o->params, topic), interactions);
      config.algo = {o->eta, o->lambda};
      config.items_per_stance = o->items_per_stance;
      config.n_items = o->items_per_stance * kNumStances;
      config.topic = topic.empty() ? "pooled" : topic;
      config.validate();

      const auto dir = common.out_dir();
      InteractionLog log;
      std::ofstream summary(dir / "runs.csv");
      summary << "run_id,seed,steady_ext,steady_pol\n";
      std::ofstream plot;
      if (o->emit_plot_data) {
        plot.open(dir / "plot_data.csv");
        plot << "topic,lambda,eta,replicate,t,metric,value\n";
      }
      for (std::size_t r = 0; r < runs; ++r) {
        RunConfig rc = config;
        rc.seed = derive_seed(common.seed, {r});
        rc.run_id = "sim-" + std::to_string(r + 1);
        const RunResult result = run(rc);
        for (auto& rec : result.to_records(rc.run_id, rc.algo)) log.records.push_back(std::move(rec));
        summary << rc.run_id << ',' << rc.seed << ',' << num(result.steady_ext) << ',' << num(result.steady_pol) << '\n';
        if (o->emit_plot_data) {
          for (std::size_t t = 0; t < result.ext.size(); ++t) {
            const std::string key =
                rc.topic + ',' + num(rc.algo.lambda) + ',' + num(rc.algo.eta) + ',' + std::to_string(r) + ',' +
                std::to_string(t + 1);
            plot << key << ",ext," << num(result.ext[t]) << '\n';
            plot << key << ",pol," << num(result.pol[t]) << '\n';
          }
        }
      }
      write_event_log(dir / "events.jsonl", log);
      std::vector<std::string> outputs = {"events.jsonl", "runs.csv"};
      if (o->emit_plot_data) outputs.emplace_back("plot_data.csv");
      std::vector<std::filesystem::path> inputs;
      if (!o->params.empty()) inputs.emplace_back(o->params);
      write_manifest(dir, "simulate", common, inputs, outputs);
      std::cout << "wrote " << runs << " runs (" << log.size() << " events) to " << dir.string() << '\n';
    };
  });
}

void add_sweep(CLI::App& root, Common& common, Action& action) {
  auto* app = root.add_subcommand("sweep", "Steady-state metrics over a (lambda, eta) grid and the corner scenarios");
  auto o = std::make_shared<SweepArgs>();
  app->add_option("--params", o->params, "Parameters file (default: built-in presets)");
  app->add_option("--topic", o->topic, "Topic whose parameters drive the grid (default pooled)");
  o->grid_lambda_opt = app->add_option("--grid-lambda", o->grid_lambda, "Comma-separated lambda values");
  o->grid_eta_opt = app->add_option("--grid-eta", o->grid_eta, "Comma-separated eta values");
  o->replicates_opt =
      app->add_option("--replicates", o->replicates, "Runs per cell")->capture_default_str()->check(CLI::PositiveNumber);
  o->interactions_opt = app->add_option("--interactions", o->interactions, "Interactions per run")->capture_default_str();
  app->add_option("--eta-max", o->eta_max, "Engagement reward of the corner scenarios")->capture_default_str();
  app->add_option("--threads", o->threads, "Worker threads (0: all cores)")->capture_default_str();
  app->add_flag("--no-corners", o->no_corners, "Skip the per-topic corner scenarios");
  app->add_flag("--emit-plot-data", o->emit_plot_data, "Write per-replicate steady metrics in long format");
  app->callback([&common, &action, o]() {
    action = [&common, o]() {
      const auto lambdas = grid_from(common, o->grid_lambda_opt, o->grid_lambda, "grid_lambda", "--grid-lambda",
                                     default_lambda_grid());
      const auto etas = grid_from(common, o->grid_eta_opt, o->grid_eta, "grid_eta", "--grid-eta", default_eta_grid());
      const std::size_t replicates = common.pick<std::size_t>(o->replicates_opt, o->replicates, "replicates", 1000);
      const std::size_t interactions =
          common.pick<std::size_t>(o->interactions_opt, o->interactions, "n_interactions", 500);
      const unsigned threads = o->threads ? o->threads : std::max(1u, std::thread::hardware_concurrency());
      const std::string grid_topic = o->topic.empty() ? common.config.value("topic", std::string("pooled")) : o->topic;

      const auto dir = common.out_dir();
      std::ofstream plot;
      if (o->emit_plot_data) {
        plot.open(dir / "plot_data.csv");
        plot << "topic,lambda,eta,replicate,metric,value\n";
      }

      SweepConfig grid;
      grid.lambda_grid = lambdas;
      grid.eta_grid = etas;
      grid.replicates = replicates;
      grid.base = base_config(common, resolve_behavior(o->params, grid_topic), interactions);
      grid.base.topic = grid_topic;
      grid.threads = threads;
      grid.keep_replicates = o->emit_plot_data;
      const SweepResult result = sweep(grid, progress_reporter("grid"));
      {
        std::ofstream csv(dir / "grid.csv");
        csv << "topic,lambda,eta," << kCellHeader << '\n';
        for (const auto& c : result.cells) {
          csv << grid_topic << ',' << num(c.lambda) << ',' << num(c.eta) << ',';
          write_cell_stats(csv, c);
          csv << '\n';
          if (o->emit_plot_data) write_plot_rows(plot, grid_topic, c);
        }
      }
      std::vector<std::string> outputs = {"grid.csv"};

      if (!o->no_corners) {
        std::ofstream csv(dir / "corners.csv");
        csv << "topic,scenario,lambda,eta," << kCellHeader << ",ext_ci_low,ext_ci_high,pol_ci_low,pol_ci_high\n";
        for (const auto& [topic, behavior] : behavior_table(o->params)) {
          RunConfig base = base_config(common, behavior, interactions);
          base.topic = topic;
          SweepConfig corners = corner_config(base, replicates, o->eta_max);
          corners.threads = threads;
          corners.keep_replicates = o->emit_plot_data;
          const SweepResult cr = sweep(corners, progress_reporter("corners " + topic));
          int scenario = 0;
          for (const auto& c : cr.cells) {
            const double se_ext = se_of(c.sd_ext, c.n_ext);
            const double se_pol = se_of(c.sd_pol, c.n_pol);
            csv << topic << ',' << ++scenario << ',' << num(c.lambda) << ',' << num(c.eta) << ',';
            write_cell_stats(csv, c);
            csv << ',' << (c.mean_ext ? num(*c.mean_ext - 1.96 * se_ext) : "NA") << ','
                << (c.mean_ext ? num(*c.mean_ext + 1.96 * se_ext) : "NA") << ','
                << (c.mean_pol ? num(*c.mean_pol - 1.96 * se_pol) : "NA") << ','
                << (c.mean_pol ? num(*c.mean_pol + 1.96 * se_pol) : "NA") << '\n';
            if (o->emit_plot_data) write_plot_rows(plot, topic, c);
          }
        }
        outputs.emplace_back("corners.csv");
      }
      if (o->emit_plot_data) outputs.emplace_back("plot_data.csv");
      std::vector<std::filesystem::path> inputs;
      if (!o->params.empty()) inputs.emplace_back(o->params);
      write_manifest(dir, "sweep", common, inputs, outputs);
      std::cout << "wrote " << result.cells.size() << " grid cells to " << (dir / "grid.csv").string() << '\n';
    };
  });
}

}  // namespace ranklab::cli
