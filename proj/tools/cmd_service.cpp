#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "commands.hpp"
#include "ranklab/error.hpp"
#include "ranklab/event.hpp"
#include "ranklab/http_api.hpp"
#include "ranklab/metrics.hpp"
#include "ranklab/replay.hpp"
#include "ranklab/service.hpp"

namespace ranklab::cli {

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

struct ReplayArgs {
  std::vector<std::string> logs;
  bool no_verify = false;
};

}  // namespace

void add_serve(CLI::App& root, Common& common, Action& action) {
  auto* app = root.add_subcommand("serve", "Run the experiment service over HTTP");
  app->callback([&common, &action]() {
    action = [&common]() {
      if (common.config_path.empty()) throw UsageError("serve needs --config <service.json>");
      service::ServiceConfig config = service::load_config(common.config_path);
      if (common.seed_opt->count() > 0) config.seed = common.seed;
      if (common.window_opt->count() > 0) config.window = common.window;
      service::ExperimentService svc(config);
      service::HttpServer server(svc);
      const int port = server.bind(config.bind, config.port);
      write_manifest(svc.config().data_dir, "serve", common, {}, {"runs/", "sessions.json", "snapshots/"});

      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::thread watcher([&server]() {
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
        server.stop();
      });
      std::cout << "listening on http://" << config.bind << ':' << port << " with " << svc.runs().size()
                << " runs, data in " << svc.config().data_dir.string() << std::endl;
      server.listen();
      g_stop = true;
      watcher.join();
      std::cout << "stopped\n";
    };
  });
}

void add_replay(CLI::App& root, Common& common, Action& action) {
  auto* app = root.add_subcommand("replay", "Rebuild run state from event logs and check their integrity");
  auto o = std::make_shared<ReplayArgs>();
  app->add_option("logs", o->logs, "Event logs (JSON Lines)")->required();
  app->add_flag("--no-verify", o->no_verify, "Skip the shown-ranking check");
  app->callback([&common, &action, o]() {
    action = [&common, o]() {
      InteractionLog log;
      std::vector<std::filesystem::path> inputs;
      for (const auto& path : o->logs) {
        InteractionLog part = read_event_log(path);
        for (auto& r : part.records) log.records.push_back(std::move(r));
        inputs.emplace_back(path);
      }
      ReplayOptions options;
      options.verify_rankings = !o->no_verify;
      const auto runs = replay(log, options);

      std::map<std::string, std::vector<EventRecord>> records;
      for (const auto& r : log.records) records[r.run_id].push_back(r);

      nlohmann::json out = nlohmann::json::object();
      out["format_version"] = 1;
      out["runs"] = nlohmann::json::array();
      std::cout << "run_id                          seq  applied  stale  Ext     Pol\n";
      for (const auto& [id, run] : runs) {
        const auto& recs = records[id];
        const MetricWindow window = MetricWindow::trailing(recs, recs.size(), common.window);
        const auto ext = try_extremism(window);
        const auto pol = try_polarization(window);
        nlohmann::json j;
        j["run_id"] = id;
        j["topic"] = run.topic;
        j["eta"] = run.algo.eta;
        j["lambda"] = run.algo.lambda;
        j["last_seq"] = run.last_seq;
        j["applied"] = run.applied;
        j["stale"] = run.stale;
        j["ext"] = ext ? nlohmann::json(*ext) : nlohmann::json(nullptr);
        j["pol"] = pol ? nlohmann::json(*pol) : nlohmann::json(nullptr);
        for (UserGroup g : kAllGroups) {
          const std::string tag(group_tag(g));
          j["popularity"][tag] = run.feed.state().of(g);
          j["rankings"][tag] = run.feed.ranking(g).order();
        }
        out["runs"].push_back(std::move(j));
        char line[200];
        std::snprintf(line, sizeof line, "%-30s %5llu  %7zu  %5zu  %-6s  %-6s\n", id.c_str(),
                      static_cast<unsigned long long>(run.last_seq), run.applied, run.stale, num(ext, 3).c_str(),
                      num(pol, 3).c_str());
        std::cout << line;
      }
      const auto dir = common.out_dir();
      std::ofstream(dir / "replay.json") << out.dump(2) << '\n';
      write_manifest(dir, "replay", common, inputs, {"replay.json"});
    };
  });
}

}  // namespace ranklab::cli
