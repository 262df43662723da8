#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ranklab/model.hpp"

namespace ranklab {

inline constexpr int kEventLogFormatVersion = 1;

enum class EngagementChoice : std::uint8_t { Like, Share, LikeAndShare, Nothing };

std::string_view to_string(EngagementChoice c);
std::optional<EngagementChoice> parse_engagement(std::string_view s);

// Like, share and like-and-share are all a highlight.
constexpr bool is_highlight(EngagementChoice c) { return c != EngagementChoice::Nothing; }

// One click (and engagement decision) on a displayed ranking.
struct InteractionEvent {
  std::uint64_t seq = 0;
  std::string session;
  std::string topic;
  Stance user_stance{0};
  std::vector<Stance> item_stances;               // by item index
  std::array<RankedList, kNumGroups> shown;       // every group's ranking at display time
  RankedList displayed;                           // the ranking this user saw
  std::size_t clicked_item = 0;
  Stance clicked_stance{0};
  std::size_t clicked_rank = 0;
  bool highlighted = false;
  EngagementChoice engagement = EngagementChoice::Nothing;
  std::optional<AlgorithmParams> scenario;        // absent for static-ranking logs
  std::string timestamp;                          // empty for simulated events

  // Throws ValidationError when the derived fields disagree.
  void validate() const;
};

struct LockInfo {
  std::string session;
  std::string task;
  std::int64_t acquired_at_ms = 0;
  std::int64_t released_at_ms = 0;
};

// Persistence envelope: one JSON line per record in an event log.
struct EventRecord {
  std::string run_id;
  InteractionEvent event;
  bool applied = true;  // false when the lock expired before engagement
  std::optional<LockInfo> lock;
  std::optional<bool> read_more;
  std::optional<int> perceived_stance;
};

struct InteractionLog {
  std::vector<EventRecord> records;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
};

// Builds an event with derived fields (clicked rank/stance, highlight flag)
// filled in from the displayed ranking and engagement choice.
InteractionEvent make_event(std::uint64_t seq, std::string session, std::string topic, Stance user_stance,
                            std::vector<Stance> item_stances, const std::array<RankedList, kNumGroups>& shown,
                            std::size_t clicked_item, EngagementChoice engagement,
                            std::optional<AlgorithmParams> scenario, std::string timestamp = {});

std::string to_json_line(const EventRecord& record);
// Throws ValidationError naming the offending field.
EventRecord parse_json_line(std::string_view line);

// Reads a JSON Lines event log. Errors carry path and line number.
InteractionLog read_event_log(const std::filesystem::path& path);
void write_event_log(const std::filesystem::path& path, const InteractionLog& log);

// Append-only writer; each append is flushed (and synced when requested)
// before returning.
class EventLogWriter {
 public:
  explicit EventLogWriter(const std::filesystem::path& path, bool sync = false);
  ~EventLogWriter();

  EventLogWriter(const EventLogWriter&) = delete;
  EventLogWriter& operator=(const EventLogWriter&) = delete;

  void append(const EventRecord& record);

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  bool sync_ = false;
};

}  // namespace ranklab
