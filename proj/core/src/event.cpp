#include "ranklab/event.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "json.hpp"

#include "ranklab/error.hpp"

namespace ranklab {

using nlohmann::json;

std::string_view to_string(EngagementChoice c) {
  switch (c) {
    case EngagementChoice::Like:
      return "like";
    case EngagementChoice::Share:
      return "share";
    case EngagementChoice::LikeAndShare:
      return "like_and_share";
    case EngagementChoice::Nothing:
      return "nothing";
  }
  return "nothing";
}

std::optional<EngagementChoice> parse_engagement(std::string_view s) {
  if (s == "like") return EngagementChoice::Like;
  if (s == "share") return EngagementChoice::Share;
  if (s == "like_and_share") return EngagementChoice::LikeAndShare;
  if (s == "nothing") return EngagementChoice::Nothing;
  return std::nullopt;
}

void InteractionEvent::validate() const {
  const std::size_t n = item_stances.size();
  if (displayed.size() != n) throw ValidationError("displayed ranking does not cover the item set");
  for (const auto& r : shown) {
    if (r.size() != n) throw ValidationError("shown ranking does not cover the item set");
  }
  if (clicked_item >= n) throw ValidationError("clicked item outside the item set");
  if (clicked_rank != displayed.rank_of(clicked_item)) {
    throw ValidationError("clicked_rank disagrees with the displayed ranking");
  }
  if (clicked_stance != item_stances[clicked_item]) {
    throw ValidationError("clicked_stance disagrees with the clicked item's stance");
  }
  if (highlighted != is_highlight(engagement)) {
    throw ValidationError("highlighted flag disagrees with engagement_choice");
  }
  if (displayed != shown[group_index(group_of(user_stance))]) {
    throw ValidationError("displayed ranking is not the user's group ranking");
  }
}

InteractionEvent make_event(std::uint64_t seq, std::string session, std::string topic, Stance user_stance,
                            std::vector<Stance> item_stances, const std::array<RankedList, kNumGroups>& shown,
                            std::size_t clicked_item, EngagementChoice engagement,
                            std::optional<AlgorithmParams> scenario, std::string timestamp) {
  InteractionEvent e;
  e.seq = seq;
  e.session = std::move(session);
  e.topic = std::move(topic);
  e.user_stance = user_stance;
  e.item_stances = std::move(item_stances);
  e.shown = shown;
  e.displayed = shown[group_index(group_of(user_stance))];
  e.clicked_item = clicked_item;
  e.clicked_stance = e.item_stances.at(clicked_item);
  e.clicked_rank = e.displayed.rank_of(clicked_item);
  e.engagement = engagement;
  e.highlighted = is_highlight(engagement);
  e.scenario = scenario;
  e.timestamp = std::move(timestamp);
  return e;
}

namespace {

json ranking_json(const RankedList& r) { return json(r.order()); }

RankedList ranking_from(const json& j, const char* field) {
  if (!j.is_array()) throw ValidationError(std::string("field '") + field + "' must be an array");
  try {
    return RankedList(j.get<std::vector<std::size_t>>());
  } catch (const json::exception&) {
    throw ValidationError(std::string("field '") + field + "' must hold item indices");
  }
}

template <class T>
T required(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || it->is_null()) throw ValidationError(std::string("missing field '") + field + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field '") + field + "' has the wrong type");
  }
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw ValidationError(std::string("missing field '") + name + "'");
  return *it;
}

Stance stance_field(const json& j, const char* field) {
  const int v = required<int>(j, field);
  auto s = Stance::parse(v);
  if (!s) throw ValidationError(std::string("field '") + field + "' is not a stance: " + std::to_string(v));
  return *s;
}

}  // namespace

std::string to_json_line(const EventRecord& record) {
  const InteractionEvent& e = record.event;
  json j;
  j["format_version"] = kEventLogFormatVersion;
  j["run_id"] = record.run_id;
  j["seq"] = e.seq;
  j["session"] = e.session;
  j["topic"] = e.topic;
  j["user_stance"] = e.user_stance.value();
  std::vector<int> stances;
  stances.reserve(e.item_stances.size());
  for (Stance s : e.item_stances) stances.push_back(s.value());
  j["item_stances"] = stances;
  j["shown_ranking"] = {{"L", ranking_json(e.shown[0])}, {"C", ranking_json(e.shown[1])}, {"R", ranking_json(e.shown[2])}};
  j["displayed"] = ranking_json(e.displayed);
  j["clicked_item"] = e.clicked_item;
  j["clicked_stance"] = e.clicked_stance.value();
  j["clicked_rank"] = e.clicked_rank;
  j["highlighted"] = e.highlighted;
  j["engagement_choice"] = to_string(e.engagement);
  if (e.scenario) {
    j["scenario"] = {{"eta", e.scenario->eta}, {"lambda", e.scenario->lambda}};
  } else {
    j["scenario"] = nullptr;
  }
  j["timestamp"] = e.timestamp.empty() ? json(nullptr) : json(e.timestamp);
  j["applied"] = record.applied;
  if (record.lock) {
    j["lock"] = {{"session", record.lock->session},
                 {"task", record.lock->task},
                 {"acquired_at_ms", record.lock->acquired_at_ms},
                 {"released_at_ms", record.lock->released_at_ms}};
  } else {
    j["lock"] = nullptr;
  }
  j["read_more"] = record.read_more ? json(*record.read_more) : json(nullptr);
  j["perceived_stance"] = record.perceived_stance ? json(*record.perceived_stance) : json(nullptr);
  return j.dump();
}

EventRecord parse_json_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& ex) {
    throw ValidationError(std::string("malformed JSON: ") + ex.what());
  }
  if (!j.is_object()) throw ValidationError("event record must be a JSON object");
  const int version = required<int>(j, "format_version");
  if (version != kEventLogFormatVersion) {
    throw ValidationError("unsupported event log format_version " + std::to_string(version));
  }
  EventRecord r;
  r.run_id = required<std::string>(j, "run_id");
  InteractionEvent& e = r.event;
  e.seq = required<std::uint64_t>(j, "seq");
  if (e.seq < 1) throw ValidationError("seq must be >= 1");
  e.session = required<std::string>(j, "session");
  e.topic = required<std::string>(j, "topic");
  e.user_stance = stance_field(j, "user_stance");
  for (int v : required<std::vector<int>>(j, "item_stances")) {
    auto s = Stance::parse(v);
    if (!s) throw ValidationError("item_stances contains a non-stance value " + std::to_string(v));
    e.item_stances.push_back(*s);
  }
  const json& shown = field(j, "shown_ranking");
  if (!shown.is_object()) throw ValidationError("field 'shown_ranking' must be an object keyed by L/C/R");
  for (UserGroup g : kAllGroups) {
    const std::string tag(group_tag(g));
    if (!shown.contains(tag)) throw ValidationError("shown_ranking lacks group " + tag);
    e.shown[group_index(g)] = ranking_from(shown.at(tag), "shown_ranking");
  }
  e.displayed = ranking_from(field(j, "displayed"), "displayed");
  e.clicked_item = required<std::size_t>(j, "clicked_item");
  e.clicked_stance = stance_field(j, "clicked_stance");
  e.clicked_rank = required<std::size_t>(j, "clicked_rank");
  e.highlighted = required<bool>(j, "highlighted");
  auto choice = parse_engagement(required<std::string>(j, "engagement_choice"));
  if (!choice) throw ValidationError("unknown engagement_choice");
  e.engagement = *choice;
  if (j.contains("scenario") && !j["scenario"].is_null()) {
    AlgorithmParams a{required<double>(j["scenario"], "eta"), required<double>(j["scenario"], "lambda")};
    a.validate();
    e.scenario = a;
  }
  if (j.contains("timestamp") && j["timestamp"].is_string()) e.timestamp = j["timestamp"].get<std::string>();
  r.applied = j.contains("applied") ? required<bool>(j, "applied") : true;
  if (j.contains("lock") && j["lock"].is_object()) {
    const json& l = j["lock"];
    r.lock = LockInfo{required<std::string>(l, "session"), required<std::string>(l, "task"),
                      required<std::int64_t>(l, "acquired_at_ms"), required<std::int64_t>(l, "released_at_ms")};
  }
  if (j.contains("read_more") && j["read_more"].is_boolean()) r.read_more = j["read_more"].get<bool>();
  if (j.contains("perceived_stance") && j["perceived_stance"].is_number_integer()) {
    r.perceived_stance = j["perceived_stance"].get<int>();
  }
  e.validate();
  return r;
}

InteractionLog read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open event log: " + path.string());
  InteractionLog log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      log.records.push_back(parse_json_line(line));
    } catch (const DataError& ex) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return log;
}

void write_event_log(const std::filesystem::path& path, const InteractionLog& log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write event log: " + path.string());
  for (const auto& r : log.records) out << to_json_line(r) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

EventLogWriter::EventLogWriter(const std::filesystem::path& path, bool sync) : path_(path), sync_(sync) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw DataError("cannot open event log for append: " + path.string() + ": " + std::strerror(errno));
}

EventLogWriter::~EventLogWriter() {
  if (fd_ >= 0) ::close(fd_);
}

void EventLogWriter::append(const EventRecord& record) {
  std::string line = to_json_line(record);
  line.push_back('\n');
  // O_APPEND makes a single write atomic with respect to other appenders.
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw DataError("append failed: " + path_.string() + ": " + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
  if (sync_ && ::fsync(fd_) != 0) throw DataError("fsync failed: " + path_.string());
}

}  // namespace ranklab
