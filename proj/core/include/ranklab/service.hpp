#pragma once

// Dynamic-ranking experiment service: a pool of independently evolving runs
// (scenario x topic x repetition), participant sessions with a randomized
// task order, one lock holder per run during a participant's interaction,
// and an append-only event log per run that is authoritative for run state.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ranklab/event.hpp"
#include "ranklab/model.hpp"

namespace ranklab::service {

struct TopicSpec {
  std::string id;
  std::string title;
  std::string description;
  std::map<std::string, std::string> stance_text;  // "left", "center", "right"
  std::vector<NewsItem> items;
};

struct Corpus {
  std::vector<TopicSpec> topics;

  const TopicSpec& topic(const std::string& id) const;
};

Corpus corpus_from_json(const std::string& text);
Corpus load_corpus(const std::filesystem::path& path);

struct ScenarioSpec {
  std::string name;
  AlgorithmParams algo;
};

struct ServiceConfig {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "ranklab-data";
  std::optional<std::filesystem::path> static_dir;
  Corpus corpus;
  std::vector<ScenarioSpec> scenarios;
  std::size_t repetitions = 3;
  std::chrono::milliseconds lock_timeout{std::chrono::minutes(15)};
  std::size_t window = 200;
  std::uint64_t seed = 1;
  bool sync_writes = true;
  bool deterministic_ids = false;
  std::size_t snapshot_every = 50;
  std::int64_t retry_after_ms = 1000;

  void validate() const;
};

// Reads a JSON config. Relative corpus/data/static paths resolve against the
// config file's directory. RANKLAB_PORT and RANKLAB_DATA_DIR override.
ServiceConfig load_config(const std::filesystem::path& path);
void apply_env_overrides(ServiceConfig& config);

// Milliseconds since the Unix epoch.
using Clock = std::function<std::int64_t()>;
Clock system_clock();

enum class TaskPhase { AwaitStance, StanceReported, RankingServed, Clicked, Done };
std::string_view to_string(TaskPhase p);

struct TaskView {
  std::string topic;
  std::size_t index = 0;
  TaskPhase phase = TaskPhase::AwaitStance;
  std::optional<Stance> stance;
};

struct SessionView {
  std::string session_id;
  std::string scenario;
  std::vector<std::string> task_order;
  std::optional<TaskView> current;  // none once every task is done
  std::size_t completed = 0;
};

struct ServedRanking {
  std::string run_id;
  std::vector<NewsItem> items;  // display order, rank 1 first
};

struct RetryLater {
  std::int64_t retry_after_ms = 0;
};

using ServeOutcome = std::variant<ServedRanking, RetryLater>;

struct ClickOutcome {
  NewsItem article;
  bool stale = false;
};

struct EngagementAux {
  std::optional<bool> read_more;
  std::optional<int> perceived_stance;
};

struct EngagementOutcome {
  bool applied = false;
  std::uint64_t seq = 0;
  std::optional<TaskView> next_task;
};

struct RunInfo {
  std::string run_id;
  std::string topic;
  std::string scenario;
  AlgorithmParams algo;
  std::size_t repetition = 0;
  std::size_t interaction_count = 0;
  bool locked = false;
};

struct RunMetrics {
  std::string run_id;
  std::size_t interaction_count = 0;
  std::size_t window_size = 0;
  std::optional<double> ext;
  std::optional<double> pol;
  std::array<RankedList, kNumGroups> rankings;
  PopularityState popularity;
};

class ExperimentService {
 public:
  // Restores run state by replaying any event logs in config.data_dir.
  explicit ExperimentService(ServiceConfig config, Clock clock = system_clock());
  ~ExperimentService();

  ExperimentService(const ExperimentService&) = delete;
  ExperimentService& operator=(const ExperimentService&) = delete;

  const ServiceConfig& config() const { return config_; }

  SessionView create_session();
  SessionView session(const std::string& session_id) const;

  void submit_stance(const std::string& session_id, const std::string& topic, int stance);
  ServeOutcome serve_ranking(const std::string& session_id, const std::string& topic);
  ClickOutcome submit_click(const std::string& session_id, const std::string& topic, const std::string& item_id);
  EngagementOutcome submit_engagement(const std::string& session_id, const std::string& topic,
                                      EngagementChoice choice, const EngagementAux& aux = {});

  std::vector<RunInfo> runs() const;
  // Reads a published snapshot; does not wait on interaction traffic.
  RunMetrics run_metrics(const std::string& run_id) const;

  // Event records of one run, in seq order.
  std::vector<EventRecord> run_records(const std::string& run_id) const;
  std::filesystem::path run_log_path(const std::string& run_id) const;

  // Writes popularity/ranking snapshots of every run.
  void write_snapshots() const;

 private:
  struct Run;
  struct Session;

  Session& find_session(const std::string& id);
  const Session& find_session(const std::string& id) const;
  Run& find_run(const std::string& id);
  SessionView view_of(const Session& s) const;
  void expire_lock(Run& run, std::int64_t now);
  void publish(Run& run);
  void persist_sessions() const;
  void load_sessions();
  void write_snapshot(const Run& run) const;

  ServiceConfig config_;
  Clock clock_;
  mutable std::mutex mu_;
  std::vector<std::unique_ptr<Run>> runs_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  std::vector<std::string> session_order_;
  std::uint64_t id_nonce_ = 0;
};

}  // namespace ranklab::service
