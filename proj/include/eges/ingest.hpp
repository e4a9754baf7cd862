#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace eges {

enum class Action { kClick, kPurchase };

struct BehaviorEvent {
  std::string user_id;
  std::string item_id;
  std::int64_t timestamp = 0;  // seconds since epoch
  Action action = Action::kClick;
  std::int64_t dwell = 0;  // seconds spent after a click

  friend bool operator==(const BehaviorEvent&, const BehaviorEvent&) = default;
};

struct Session {
  std::string user_id;
  std::vector<std::string> items;
  std::int64_t start = 0;

  friend bool operator==(const Session&, const Session&) = default;
};

struct NoiseConfig {
  std::int64_t min_dwell = 1;
  std::int64_t max_purchases = 1000;
  std::int64_t max_clicks = 3500;
  std::int64_t observation_span_days = 90;

  void validate() const;
};

inline constexpr std::int64_t kDefaultSessionWindow = 3600;

struct ParsedLog {
  std::vector<BehaviorEvent> events;
  std::size_t skipped = 0;
};

// TSV rows: user_id, item_id, timestamp, action (click|purchase), dwell.
// Malformed rows are skipped and counted; FormatError when more than half
// of the non-blank rows are malformed.
ParsedLog parse_behavior_log(std::istream& in);
ParsedLog read_behavior_log(const std::filesystem::path& path);

// Drops (a) clicks with dwell < min_dwell, (b) every event of a user whose
// purchases or clicks exceed the limits inside one observation tile, and
// (c) events on delisted items. Survivor order is preserved.
//
// Tiles are fixed consecutive spans of observation_span_days anchored at
// t = 0, so re-filtering a filtered stream is a no-op.
std::vector<BehaviorEvent> filter_noise(
    std::span<const BehaviorEvent> events, const NoiseConfig& cfg,
    const std::unordered_set<std::string>& delisted_items);

// Per user (in order of first appearance), events are ordered by timestamp
// and cut into sessions anchored at their first event: an event joins the
// open session iff it lies within `window` seconds of that session's start.
// Consecutive repeats of an item inside a session collapse to one.
std::vector<Session> sessionize(std::span<const BehaviorEvent> events,
                                std::int64_t window = kDefaultSessionWindow);

// One item_id per line; blank lines ignored.
std::unordered_set<std::string> read_item_set(std::istream& in);

// `user_id<TAB>item1,item2,...` per session.
void write_sessions(std::span<const Session> sessions, std::ostream& out);
std::vector<Session> read_sessions(std::istream& in);

}  // namespace eges
