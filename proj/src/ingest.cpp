#include "eges/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>

#include "eges/error.hpp"
#include "text_util.hpp"

namespace eges {

void NoiseConfig::validate() const {
  if (min_dwell <= 0 || max_purchases <= 0 || max_clicks <= 0 ||
      observation_span_days <= 0) {
    throw ConfigError("noise thresholds must be strictly positive");
  }
}

namespace {

bool parse_event(std::string_view line, BehaviorEvent& ev) {
  auto cols = detail::split(line, '\t');
  if (cols.size() != 5) return false;
  if (cols[0].empty() || cols[1].empty()) return false;
  std::int64_t ts = 0;
  std::int64_t dwell = 0;
  if (!detail::parse_int(cols[2], ts) || ts < 0) return false;
  if (!detail::parse_int(cols[4], dwell) || dwell < 0) return false;
  if (cols[3] == "click") {
    ev.action = Action::kClick;
  } else if (cols[3] == "purchase") {
    ev.action = Action::kPurchase;
  } else {
    return false;
  }
  ev.user_id.assign(cols[0]);
  ev.item_id.assign(cols[1]);
  ev.timestamp = ts;
  ev.dwell = dwell;
  return true;
}

}  // namespace

ParsedLog parse_behavior_log(std::istream& in) {
  ParsedLog out;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    if (line.empty() || detail::is_header_comment(line)) continue;
    ++rows;
    BehaviorEvent ev;
    if (parse_event(line, ev)) {
      out.events.push_back(std::move(ev));
    } else {
      ++out.skipped;
    }
  }
  if (in.bad()) throw IoError("failed reading behavior log");
  if (out.skipped * 2 > rows) {
    throw FormatError("behavior log: " + std::to_string(out.skipped) + " of " +
                      std::to_string(rows) + " rows malformed");
  }
  return out;
}

ParsedLog read_behavior_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_behavior_log(in);
}

std::vector<BehaviorEvent> filter_noise(
    std::span<const BehaviorEvent> events, const NoiseConfig& cfg,
    const std::unordered_set<std::string>& delisted_items) {
  cfg.validate();
  const std::int64_t tile = cfg.observation_span_days * 86400;

  struct Counts {
    std::int64_t clicks = 0;
    std::int64_t purchases = 0;
  };
  // (user, tile index) -> counts; spam detection looks at raw activity.
  std::unordered_map<std::string, std::unordered_map<std::int64_t, Counts>>
      activity;
  for (const auto& ev : events) {
    auto& c = activity[ev.user_id][ev.timestamp / tile];
    if (ev.action == Action::kClick) {
      ++c.clicks;
    } else {
      ++c.purchases;
    }
  }
  std::unordered_set<std::string> spam;
  for (const auto& [user, tiles] : activity) {
    for (const auto& [_, c] : tiles) {
      if (c.clicks > cfg.max_clicks || c.purchases > cfg.max_purchases) {
        spam.insert(user);
        break;
      }
    }
  }

  std::vector<BehaviorEvent> kept;
  kept.reserve(events.size());
  for (const auto& ev : events) {
    if (ev.action == Action::kClick && ev.dwell < cfg.min_dwell) continue;
    if (spam.contains(ev.user_id)) continue;
    if (delisted_items.contains(ev.item_id)) continue;
    kept.push_back(ev);
  }
  return kept;
}

std::vector<Session> sessionize(std::span<const BehaviorEvent> events,
                                std::int64_t window) {
  if (window <= 0) throw ConfigError("session window must be positive");

  std::vector<std::string_view> users;
  std::unordered_map<std::string_view, std::vector<const BehaviorEvent*>>
      by_user;
  for (const auto& ev : events) {
    auto [it, inserted] = by_user.try_emplace(ev.user_id);
    if (inserted) users.push_back(ev.user_id);
    it->second.push_back(&ev);
  }

  std::vector<Session> sessions;
  for (auto user : users) {
    auto& stream = by_user[user];
    std::stable_sort(stream.begin(), stream.end(),
                     [](const BehaviorEvent* a, const BehaviorEvent* b) {
                       return a->timestamp < b->timestamp;
                     });
    Session* open = nullptr;
    for (const BehaviorEvent* ev : stream) {
      if (open == nullptr || ev->timestamp - open->start > window) {
        sessions.push_back(Session{std::string(user), {}, ev->timestamp});
        open = &sessions.back();
      }
      if (open->items.empty() || open->items.back() != ev->item_id) {
        open->items.push_back(ev->item_id);
      }
    }
  }
  return sessions;
}

std::unordered_set<std::string> read_item_set(std::istream& in) {
  std::unordered_set<std::string> items;
  std::string line;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    if (!line.empty()) items.insert(line);
  }
  if (in.bad()) throw IoError("failed reading item list");
  return items;
}

void write_sessions(std::span<const Session> sessions, std::ostream& out) {
  for (const auto& s : sessions) {
    out << s.user_id << '\t';
    for (std::size_t i = 0; i < s.items.size(); ++i) {
      if (i > 0) out << ',';
      out << s.items[i];
    }
    out << '\n';
  }
}

std::vector<Session> read_sessions(std::istream& in) {
  std::vector<Session> sessions;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (line.empty() || detail::is_header_comment(line)) continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      throw FormatError("sessions line " + std::to_string(lineno) +
                        ": expected user_id<TAB>items");
    }
    Session s;
    s.user_id.assign(cols[0]);
    for (auto item : detail::split(cols[1], ',')) {
      if (item.empty()) {
        throw FormatError("sessions line " + std::to_string(lineno) +
                          ": empty item");
      }
      s.items.emplace_back(item);
    }
    sessions.push_back(std::move(s));
  }
  if (in.bad()) throw IoError("failed reading sessions");
  return sessions;
}

}  // namespace eges
