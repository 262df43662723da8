#include "ranklab/service.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ranklab/error.hpp"
#include "ranklab/metrics.hpp"
#include "ranklab/replay.hpp"

namespace ranklab::service {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Corpus and configuration

const TopicSpec& Corpus::topic(const std::string& id) const {
  for (const auto& t : topics) {
    if (t.id == id) return t;
  }
  throw NotFoundError("unknown topic '" + id + "'");
}

Corpus corpus_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed corpus: ") + e.what());
  }
  try {
    Corpus corpus;
    for (const auto& t : root.at("topics")) {
      TopicSpec spec;
      spec.id = t.at("id").get<std::string>();
      spec.title = t.value("title", spec.id);
      spec.description = t.value("description", std::string{});
      if (t.contains("stances")) spec.stance_text = t["stances"].get<std::map<std::string, std::string>>();
      std::set<std::string> ids;
      for (const auto& it : t.at("items")) {
        NewsItem item;
        item.id = it.at("id").get<std::string>();
        item.stance = Stance(it.at("stance").get<int>());
        item.topic = spec.id;
        item.title = it.value("title", item.id);
        item.body = it.value("body", std::string{});
        item.source = it.value("source", std::string{});
        if (!ids.insert(item.id).second) throw ConfigError("duplicate item id '" + item.id + "' in topic " + spec.id);
        spec.items.push_back(std::move(item));
      }
      if (spec.items.empty()) throw ConfigError("topic " + spec.id + " has no items");
      corpus.topics.push_back(std::move(spec));
    }
    if (corpus.topics.empty()) throw ConfigError("corpus has no topics");
    return corpus;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid corpus: ") + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("invalid corpus: ") + e.what());
  }
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Corpus load_corpus(const fs::path& path) { return corpus_from_json(read_file(path)); }

void ServiceConfig::validate() const {
  if (scenarios.empty()) throw ConfigError("service needs at least one scenario");
  if (corpus.topics.empty()) throw ConfigError("service needs at least one topic");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (lock_timeout.count() <= 0) throw ConfigError("lock timeout must be positive");
  if (window < 1) throw ConfigError("window must be >= 1");
  for (const auto& s : scenarios) {
    try {
      s.algo.validate();
    } catch (const ValidationError& e) {
      throw ConfigError("scenario " + s.name + ": " + e.what());
    }
  }
}

void apply_env_overrides(ServiceConfig& config) {
  if (const char* port = std::getenv("RANKLAB_PORT"); port && *port) {
    char* end = nullptr;
    const long p = std::strtol(port, &end, 10);
    if (*end != '\0' || p <= 0 || p > 65535) throw ConfigError(std::string("invalid RANKLAB_PORT: ") + port);
    config.port = static_cast<int>(p);
  }
  if (const char* dir = std::getenv("RANKLAB_DATA_DIR"); dir && *dir) config.data_dir = dir;
}

ServiceConfig load_config(const fs::path& path) {
  json root;
  try {
    root = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  ServiceConfig c;
  try {
    if (root.value("format_version", 0) != 1) throw ConfigError("service config must declare format_version 1");
    c.bind = root.value("bind", c.bind);
    c.port = root.value("port", c.port);
    c.data_dir = resolve(root.value("data_dir", c.data_dir.string()));
    if (root.contains("static_dir") && root["static_dir"].is_string()) c.static_dir = resolve(root["static_dir"]);
    c.corpus = load_corpus(resolve(root.at("corpus").get<std::string>()));
    c.repetitions = root.value("repetitions", c.repetitions);
    c.lock_timeout = std::chrono::milliseconds(
        static_cast<std::int64_t>(root.value("lock_timeout_s", 900.0) * 1000.0));
    c.window = root.value("window", c.window);
    c.seed = root.value("seed", c.seed);
    c.sync_writes = root.value("sync_writes", c.sync_writes);
    c.snapshot_every = root.value("snapshot_every", c.snapshot_every);
    c.retry_after_ms = root.value("retry_after_ms", c.retry_after_ms);
    for (const auto& s : root.at("scenarios")) {
      c.scenarios.push_back({s.at("name").get<std::string>(),
                             AlgorithmParams{s.at("eta").get<double>(), s.at("lambda").get<double>()}});
    }
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  apply_env_overrides(c);
  c.validate();
  return c;
}

Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

std::string_view to_string(TaskPhase p) {
  switch (p) {
    case TaskPhase::AwaitStance:
      return "stance";
    case TaskPhase::StanceReported:
      return "ranking";
    case TaskPhase::RankingServed:
      return "click";
    case TaskPhase::Clicked:
      return "engagement";
    case TaskPhase::Done:
      return "done";
  }
  return "done";
}

// ---------------------------------------------------------------------------
// Internal state

struct ExperimentService::Run {
  std::string id;
  std::string topic;
  std::size_t scenario_index = 0;
  std::size_t repetition = 0;
  AlgorithmParams algo;
  std::vector<Stance> stances;
  RankingFeed feed;
  std::uint64_t next_seq = 1;
  std::size_t applied = 0;
  struct Lock {
    std::string session;
    std::string task;
    std::int64_t acquired_at = 0;
  };
  std::optional<Lock> lock;
  std::int64_t last_used = 0;
  std::unique_ptr<EventLogWriter> writer;
  std::vector<EventRecord> records;

  mutable std::mutex snapshot_mu;
  std::shared_ptr<const RunMetrics> snapshot;

  Run(std::string id_, AlgorithmParams algo_, const RankedList& initial) : id(std::move(id_)), algo(algo_), feed(algo_, initial) {}
};

struct ExperimentService::Session {
  std::string id;
  std::size_t scenario_index = 0;
  std::vector<std::string> task_order;
  struct Task {
    std::string topic;
    TaskPhase phase = TaskPhase::AwaitStance;
    std::optional<Stance> stance;
    std::string run_id;
    std::int64_t lock_acquired_at = 0;
    std::array<RankedList, kNumGroups> shown;
    std::optional<std::size_t> clicked_item;
    bool stale = false;
  };
  std::vector<Task> tasks;
  std::int64_t created_at = 0;

  Task* current() {
    for (auto& t : tasks) {
      if (t.phase != TaskPhase::Done) return &t;
    }
    return nullptr;
  }
  const Task* current() const { return const_cast<Session*>(this)->current(); }
};

namespace {

std::string iso_timestamp(std::int64_t ms) {
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms % 1000));
  return buf;
}

std::string hex_id(std::uint64_t a, std::uint64_t b) {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(a), static_cast<unsigned long long>(b));
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

json ranking_json(const RankedList& r) { return json(r.order()); }

}  // namespace

// ---------------------------------------------------------------------------
// Construction and recovery

ExperimentService::ExperimentService(ServiceConfig config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)) {
  config_.validate();
  fs::create_directories(config_.data_dir / "runs");
  fs::create_directories(config_.data_dir / "snapshots");
  if (!config_.deterministic_ids) id_nonce_ = (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}();

  std::size_t run_index = 0;
  for (std::size_t si = 0; si < config_.scenarios.size(); ++si) {
    for (const auto& topic : config_.corpus.topics) {
      for (std::size_t rep = 0; rep < config_.repetitions; ++rep, ++run_index) {
        const std::string id = config_.scenarios[si].name + "-" + topic.id + "-" + std::to_string(rep + 1);
        Rng rng(derive_seed(config_.seed, {run_index}));
        const RankedList initial = RankedList::random(topic.items.size(), rng);
        auto run = std::make_unique<Run>(id, config_.scenarios[si].algo, initial);
        run->topic = topic.id;
        run->scenario_index = si;
        run->repetition = rep;
        for (const auto& item : topic.items) run->stances.push_back(item.stance);

        const fs::path log_path = run_log_path(id);
        if (fs::exists(log_path)) {
          InteractionLog log = read_event_log(log_path);
          for (const auto& r : log.records) {
            if (r.run_id != id) throw IntegrityError(log_path.string() + " holds a record of run " + r.run_id);
          }
          ReplayOptions opts;
          opts.initial.emplace(id, initial);
          auto replayed = replay(log, opts);
          if (!log.empty()) {
            auto& rr = replayed.at(id);
            if (!(rr.algo == run->algo)) throw IntegrityError(log_path.string() + ": scenario differs from config");
            run->feed = rr.feed;
            run->next_seq = rr.last_seq + 1;
            run->applied = rr.applied;
          }
          run->records = std::move(log.records);
        }
        run->writer = std::make_unique<EventLogWriter>(log_path, config_.sync_writes);
        publish(*run);
        runs_.push_back(std::move(run));
      }
    }
  }
  load_sessions();
}

ExperimentService::~ExperimentService() {
  try {
    write_snapshots();
  } catch (...) {
  }
}

fs::path ExperimentService::run_log_path(const std::string& run_id) const {
  return config_.data_dir / "runs" / (run_id + ".jsonl");
}

void ExperimentService::load_sessions() {
  const fs::path path = config_.data_dir / "sessions.json";
  if (!fs::exists(path)) return;
  json root;
  try {
    root = json::parse(read_file(path));
    for (const auto& js : root.at("sessions")) {
      auto s = std::make_unique<Session>();
      s->id = js.at("id").get<std::string>();
      s->scenario_index = js.at("scenario_index").get<std::size_t>();
      s->created_at = js.value("created_at", std::int64_t{0});
      for (const auto& jt : js.at("tasks")) {
        Session::Task t;
        t.topic = jt.at("topic").get<std::string>();
        t.phase = static_cast<TaskPhase>(jt.at("phase").get<int>());
        if (jt.contains("stance") && jt["stance"].is_number_integer()) t.stance = Stance(jt["stance"].get<int>());
        // Locks do not survive a restart; in-flight tasks become stale.
        if (t.phase == TaskPhase::RankingServed || t.phase == TaskPhase::Clicked) {
          t.run_id = jt.value("run_id", std::string{});
          t.stale = true;
          if (jt.contains("clicked_item") && jt["clicked_item"].is_number_unsigned()) {
            t.clicked_item = jt["clicked_item"].get<std::size_t>();
          }
          if (jt.contains("shown")) {
            for (UserGroup g : kAllGroups) {
              t.shown[group_index(g)] =
                  RankedList(jt["shown"].at(std::string(group_tag(g))).get<std::vector<std::size_t>>());
            }
          }
          t.lock_acquired_at = jt.value("lock_acquired_at", std::int64_t{0});
        }
        s->task_order.push_back(t.topic);
        s->tasks.push_back(std::move(t));
      }
      session_order_.push_back(s->id);
      sessions_.emplace(s->id, std::move(s));
    }
  } catch (const json::exception& e) {
    throw IntegrityError(path.string() + ": " + e.what());
  }
}

void ExperimentService::persist_sessions() const {
  json arr = json::array();
  for (const auto& id : session_order_) {
    const Session& s = *sessions_.at(id);
    json js;
    js["id"] = s.id;
    js["scenario_index"] = s.scenario_index;
    js["created_at"] = s.created_at;
    json tasks = json::array();
    for (const auto& t : s.tasks) {
      json jt;
      jt["topic"] = t.topic;
      jt["phase"] = static_cast<int>(t.phase);
      jt["stance"] = t.stance ? json(t.stance->value()) : json(nullptr);
      if (t.phase == TaskPhase::RankingServed || t.phase == TaskPhase::Clicked) {
        jt["run_id"] = t.run_id;
        jt["lock_acquired_at"] = t.lock_acquired_at;
        jt["shown"] = {{"L", ranking_json(t.shown[0])}, {"C", ranking_json(t.shown[1])}, {"R", ranking_json(t.shown[2])}};
        if (t.clicked_item) jt["clicked_item"] = *t.clicked_item;
      }
      tasks.push_back(std::move(jt));
    }
    js["tasks"] = std::move(tasks);
    arr.push_back(std::move(js));
  }
  atomic_write(config_.data_dir / "sessions.json", json{{"format_version", 1}, {"sessions", arr}}.dump() + "\n");
}

// ---------------------------------------------------------------------------
// Lookup helpers

ExperimentService::Session& ExperimentService::find_session(const std::string& id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
  return *it->second;
}

const ExperimentService::Session& ExperimentService::find_session(const std::string& id) const {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
  return *it->second;
}

ExperimentService::Run& ExperimentService::find_run(const std::string& id) {
  for (auto& r : runs_) {
    if (r->id == id) return *r;
  }
  throw NotFoundError("unknown run '" + id + "'");
}

SessionView ExperimentService::view_of(const Session& s) const {
  SessionView v;
  v.session_id = s.id;
  v.scenario = config_.scenarios[s.scenario_index].name;
  v.task_order = s.task_order;
  for (std::size_t i = 0; i < s.tasks.size(); ++i) {
    const auto& t = s.tasks[i];
    if (t.phase == TaskPhase::Done) {
      ++v.completed;
    } else if (!v.current) {
      v.current = TaskView{t.topic, i, t.phase, t.stance};
    }
  }
  return v;
}

void ExperimentService::expire_lock(Run& run, std::int64_t now) {
  if (run.lock && now - run.lock->acquired_at > config_.lock_timeout.count()) run.lock.reset();
}

void ExperimentService::publish(Run& run) {
  auto m = std::make_shared<RunMetrics>();
  m->run_id = run.id;
  m->interaction_count = run.applied;
  const MetricWindow w = MetricWindow::trailing(std::span<const EventRecord>(run.records), run.records.size(), config_.window);
  m->window_size = w.clicks.size();
  m->ext = try_extremism(w);
  m->pol = try_polarization(w);
  m->rankings = run.feed.rankings();
  m->popularity = run.feed.state();
  std::lock_guard lk(run.snapshot_mu);
  run.snapshot = std::move(m);
}

// ---------------------------------------------------------------------------
// Participant protocol

SessionView ExperimentService::create_session() {
  std::lock_guard lk(mu_);
  const std::size_t number = session_order_.size();
  auto s = std::make_unique<Session>();
  s->id = hex_id(derive_seed(config_.seed ^ id_nonce_, {number, 1}), derive_seed(config_.seed ^ id_nonce_, {number, 2}));
  // Between-subjects: balanced round-robin over scenarios.
  s->scenario_index = number % config_.scenarios.size();
  s->created_at = clock_();
  std::vector<std::string> order;
  for (const auto& t : config_.corpus.topics) order.push_back(t.id);
  Rng rng(derive_seed(config_.seed, {0x5e55, number}));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  s->task_order = order;
  for (const auto& topic : order) {
    Session::Task task;
    task.topic = topic;
    s->tasks.push_back(std::move(task));
  }
  const SessionView view = view_of(*s);
  session_order_.push_back(s->id);
  sessions_.emplace(s->id, std::move(s));
  persist_sessions();
  return view;
}

SessionView ExperimentService::session(const std::string& session_id) const {
  std::lock_guard lk(mu_);
  return view_of(find_session(session_id));
}

namespace {

template <class Task>
Task& current_task_for(Task* current, const std::string& topic) {
  if (!current) throw StateViolationError("session has completed all tasks");
  if (current->topic != topic) {
    throw StateViolationError("task '" + topic + "' is not the current task ('" + current->topic + "')");
  }
  return *current;
}

}  // namespace

void ExperimentService::submit_stance(const std::string& session_id, const std::string& topic, int stance) {
  const auto parsed = Stance::parse(stance);
  if (!parsed) throw ValidationError("stance must be in {-2,-1,0,1,2}, got " + std::to_string(stance));
  std::lock_guard lk(mu_);
  Session& s = find_session(session_id);
  auto& task = current_task_for(s.current(), topic);
  if (task.phase != TaskPhase::AwaitStance && task.phase != TaskPhase::StanceReported) {
    throw StateViolationError("stance can no longer be changed once the ranking was served");
  }
  task.stance = *parsed;
  task.phase = TaskPhase::StanceReported;
  persist_sessions();
}

ServeOutcome ExperimentService::serve_ranking(const std::string& session_id, const std::string& topic) {
  std::lock_guard lk(mu_);
  Session& s = find_session(session_id);
  auto& task = current_task_for(s.current(), topic);
  const auto& topic_spec = config_.corpus.topic(topic);
  auto served_items = [&](const RankedList& ranking) {
    std::vector<NewsItem> items;
    for (std::size_t item : ranking.order()) items.push_back(topic_spec.items[item]);
    return items;
  };
  if (task.phase == TaskPhase::RankingServed) {
    // Reconnect: the same ranking is served again.
    return ServedRanking{task.run_id, served_items(task.shown[group_index(group_of(*task.stance))])};
  }
  if (task.phase != TaskPhase::StanceReported) {
    throw StateViolationError(task.phase == TaskPhase::AwaitStance ? "stance must be submitted before the ranking"
                                                                   : "ranking was already clicked");
  }
  const std::int64_t now = clock_();
  Run* chosen = nullptr;
  for (auto& run : runs_) {
    if (run->scenario_index != s.scenario_index || run->topic != topic) continue;
    expire_lock(*run, now);
    if (run->lock) continue;
    if (!chosen || run->last_used < chosen->last_used) chosen = run.get();
  }
  if (!chosen) {
    std::int64_t wait = config_.retry_after_ms;
    return RetryLater{wait};
  }
  chosen->lock = Run::Lock{s.id, topic, now};
  chosen->last_used = now;
  task.run_id = chosen->id;
  task.lock_acquired_at = now;
  task.shown = chosen->feed.rankings();
  task.phase = TaskPhase::RankingServed;
  task.stale = false;
  persist_sessions();
  return ServedRanking{chosen->id, served_items(task.shown[group_index(group_of(*task.stance))])};
}

ClickOutcome ExperimentService::submit_click(const std::string& session_id, const std::string& topic,
                                             const std::string& item_id) {
  std::lock_guard lk(mu_);
  Session& s = find_session(session_id);
  auto& task = current_task_for(s.current(), topic);
  const auto& items = config_.corpus.topic(topic).items;
  auto it = std::find_if(items.begin(), items.end(), [&](const NewsItem& n) { return n.id == item_id; });
  if (it == items.end()) throw ValidationError("item '" + item_id + "' is not in the served ranking");
  const std::size_t index = static_cast<std::size_t>(it - items.begin());
  if (task.phase == TaskPhase::Clicked) {
    if (task.clicked_item == index) return ClickOutcome{*it, task.stale};
    throw StateViolationError("a different item was already clicked for this task");
  }
  if (task.phase != TaskPhase::RankingServed) throw StateViolationError("no ranking has been served for this task");
  Run& run = find_run(task.run_id);
  const std::int64_t now = clock_();
  const bool holds = run.lock && run.lock->session == s.id && run.lock->task == topic;
  if (holds) expire_lock(run, now);
  if (!holds || !run.lock) task.stale = true;
  task.clicked_item = index;
  task.phase = TaskPhase::Clicked;
  persist_sessions();
  return ClickOutcome{*it, task.stale};
}

EngagementOutcome ExperimentService::submit_engagement(const std::string& session_id, const std::string& topic,
                                                       EngagementChoice choice, const EngagementAux& aux) {
  std::lock_guard lk(mu_);
  Session& s = find_session(session_id);
  auto& task = current_task_for(s.current(), topic);
  if (task.phase != TaskPhase::Clicked) throw StateViolationError("engagement requires a recorded click");
  if (aux.perceived_stance && !Stance::parse(*aux.perceived_stance)) {
    throw ValidationError("perceived_stance must be in {-2,-1,0,1,2}");
  }
  Run& run = find_run(task.run_id);
  const std::int64_t now = clock_();
  const bool holds = run.lock && run.lock->session == s.id && run.lock->task == topic;
  if (holds) expire_lock(run, now);
  const bool applied = !task.stale && holds && run.lock.has_value();

  EventRecord record;
  record.run_id = run.id;
  record.applied = applied;
  record.event = make_event(run.next_seq, s.id, topic, *task.stance, run.stances, task.shown, *task.clicked_item,
                            choice, run.algo, iso_timestamp(now));
  const std::int64_t released = applied ? now : task.lock_acquired_at + config_.lock_timeout.count();
  record.lock = LockInfo{s.id, topic, task.lock_acquired_at, std::min(released, now)};
  record.read_more = aux.read_more;
  record.perceived_stance = aux.perceived_stance;

  // The record is durable before any state changes or the lock is released.
  run.writer->append(record);
  ++run.next_seq;
  if (applied) {
    run.feed.apply(record.event.user_stance, record.event.clicked_item, record.event.highlighted);
    ++run.applied;
  }
  if (holds && run.lock) run.lock.reset();
  run.records.push_back(record);
  publish(run);
  if (config_.snapshot_every > 0 && run.records.size() % config_.snapshot_every == 0) write_snapshot(run);

  task.phase = TaskPhase::Done;
  persist_sessions();
  EngagementOutcome out;
  out.applied = applied;
  out.seq = record.event.seq;
  out.next_task = view_of(s).current;
  return out;
}

// ---------------------------------------------------------------------------
// Read side

std::vector<RunInfo> ExperimentService::runs() const {
  std::lock_guard lk(mu_);
  std::vector<RunInfo> out;
  const std::int64_t now = clock_();
  for (const auto& r : runs_) {
    const bool locked = r->lock && now - r->lock->acquired_at <= config_.lock_timeout.count();
    out.push_back({r->id, r->topic, config_.scenarios[r->scenario_index].name, r->algo, r->repetition, r->applied, locked});
  }
  return out;
}

RunMetrics ExperimentService::run_metrics(const std::string& run_id) const {
  for (const auto& r : runs_) {
    if (r->id != run_id) continue;
    std::shared_ptr<const RunMetrics> snap;
    {
      std::lock_guard lk(r->snapshot_mu);
      snap = r->snapshot;
    }
    return *snap;
  }
  throw NotFoundError("unknown run '" + run_id + "'");
}

std::vector<EventRecord> ExperimentService::run_records(const std::string& run_id) const {
  std::lock_guard lk(mu_);
  for (const auto& r : runs_) {
    if (r->id == run_id) return r->records;
  }
  throw NotFoundError("unknown run '" + run_id + "'");
}

void ExperimentService::write_snapshot(const Run& run) const {
  json j;
  j["format_version"] = 1;
  j["run_id"] = run.id;
  j["last_seq"] = run.next_seq - 1;
  j["interaction_count"] = run.applied;
  j["t"] = run.feed.state().t;
  json pop, rankings;
  for (UserGroup g : kAllGroups) {
    const std::string tag(group_tag(g));
    pop[tag] = run.feed.state().of(g);
    rankings[tag] = run.feed.ranking(g).order();
  }
  j["popularity"] = pop;
  j["rankings"] = rankings;
  atomic_write(config_.data_dir / "snapshots" / (run.id + ".json"), j.dump() + "\n");
}

void ExperimentService::write_snapshots() const {
  std::lock_guard lk(mu_);
  for (const auto& r : runs_) write_snapshot(*r);
}

}  // namespace ranklab::service
