#pragma once

// Executable per-robot timelines shared by every planner, the relay ledger,
// and their JSON form.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vcst/core.hpp"

namespace vcst {

enum class ActionKind { Travel, Pickup, RelayDrop, RelayPick, Deliver, Wait };

inline std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Travel: return "travel";
    case ActionKind::Pickup: return "pickup";
    case ActionKind::RelayDrop: return "relay_drop";
    case ActionKind::RelayPick: return "relay_pick";
    case ActionKind::Deliver: return "deliver";
    case ActionKind::Wait: return "wait";
  }
  return "unknown";
}

inline std::optional<ActionKind> parse_action_kind(std::string_view s) {
  for (auto k : {ActionKind::Travel, ActionKind::Pickup, ActionKind::RelayDrop, ActionKind::RelayPick,
                 ActionKind::Deliver, ActionKind::Wait}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

/// `from` is only meaningful for Travel; every other action happens at `to`.
/// `target` is the relay id for relay actions and the goal id for Deliver.
struct Action {
  ActionKind kind = ActionKind::Wait;
  double start = 0.0;
  double end = 0.0;
  Point from;
  Point to;
  int count = 0;
  int target = -1;

  double duration() const { return end - start; }
  double length() const { return kind == ActionKind::Travel ? distance(from, to) : 0.0; }
};

struct Timeline {
  RobotId robot = 0;
  std::vector<Action> actions;
  std::vector<int> loads;  // load after each action

  double end_time() const { return actions.empty() ? 0.0 : actions.back().end; }
  int final_load() const { return loads.empty() ? 0 : loads.back(); }
};

struct LedgerEvent {
  enum class Kind { Drop, Pick };
  Kind kind = Kind::Drop;
  double time = 0.0;  // drop: completion of the drop; pick: start of the pick
  int count = 0;
  RobotId robot = 0;

  friend bool operator==(const LedgerEvent&, const LedgerEvent&) = default;
};

/// Per-relay buffer history.
struct RelayLedger {
  std::map<RelayId, std::vector<LedgerEvent>> events;

  void record(RelayId relay, LedgerEvent e) { events[relay].push_back(e); }

  int dropped(RelayId relay) const { return total(relay, LedgerEvent::Kind::Drop); }
  int picked(RelayId relay) const { return total(relay, LedgerEvent::Kind::Pick); }

  /// Packages deposited at `relay` whose drop completed no later than t.
  int available_by(RelayId relay, double t) const {
    int sum = 0;
    auto it = events.find(relay);
    if (it == events.end()) return 0;
    for (const auto& e : it->second) {
      if (e.kind == LedgerEvent::Kind::Drop && e.time <= t) sum += e.count;
    }
    return sum;
  }

  /// Earliest time at which at least `needed` packages have been dropped.
  std::optional<double> time_available(RelayId relay, int needed) const {
    if (needed <= 0) return 0.0;
    auto it = events.find(relay);
    if (it == events.end()) return std::nullopt;
    std::vector<std::pair<double, int>> drops;
    for (const auto& e : it->second) {
      if (e.kind == LedgerEvent::Kind::Drop) drops.emplace_back(e.time, e.count);
    }
    std::sort(drops.begin(), drops.end());
    int sum = 0;
    for (auto [t, c] : drops) {
      sum += c;
      if (sum >= needed) return t;
    }
    return std::nullopt;
  }

  friend bool operator==(const RelayLedger&, const RelayLedger&) = default;

 private:
  int total(RelayId relay, LedgerEvent::Kind kind) const {
    int sum = 0;
    auto it = events.find(relay);
    if (it == events.end()) return 0;
    for (const auto& e : it->second) {
      if (e.kind == kind) sum += e.count;
    }
    return sum;
  }
};

struct Plan {
  std::string planner;
  std::vector<Timeline> timelines;
  RelayLedger ledger;
};

/// Appends actions to one robot's timeline while tracking position, clock and
/// load. Durations are derived here so every planner obeys the same physics.
class TimelineBuilder {
 public:
  TimelineBuilder(RobotId robot, Point start, double speed, double t_service)
      : pos_(start), speed_(speed), t_service_(t_service) {
    timeline_.robot = robot;
  }

  Point position() const { return pos_; }
  double time() const { return time_; }
  int load() const { return load_; }
  const Timeline& timeline() const { return timeline_; }
  Timeline take() { return std::move(timeline_); }

  void travel_to(Point p) {
    if (p == pos_) return;
    Action a;
    a.kind = ActionKind::Travel;
    a.from = pos_;
    a.to = p;
    a.start = time_;
    a.end = time_ + distance(pos_, p) / speed_;
    pos_ = p;
    push(a, load_);
  }

  void wait_until(double t) {
    if (t <= time_) return;
    Action a;
    a.kind = ActionKind::Wait;
    a.to = pos_;
    a.start = time_;
    a.end = t;
    push(a, load_);
  }

  void pickup(int count) { service(ActionKind::Pickup, count, -1, load_ + count); }
  void relay_drop(RelayId relay, int count) { service(ActionKind::RelayDrop, count, relay, load_ - count); }
  void relay_pick(RelayId relay, int count) { service(ActionKind::RelayPick, count, relay, load_ + count); }
  void deliver(GoalId goal) { service(ActionKind::Deliver, 1, goal, load_ - 1); }

 private:
  void service(ActionKind kind, int count, int target, int new_load) {
    Action a;
    a.kind = kind;
    a.to = pos_;
    a.count = count;
    a.target = target;
    a.start = time_;
    a.end = time_ + t_service_;
    push(a, new_load);
  }

  void push(const Action& a, int new_load) {
    timeline_.actions.push_back(a);
    timeline_.loads.push_back(new_load);
    time_ = a.end;
    load_ = new_load;
  }

  Timeline timeline_;
  Point pos_;
  double time_ = 0.0;
  int load_ = 0;
  double speed_;
  double t_service_;
};

inline void to_json(nlohmann::json& j, const Action& a) {
  j = {{"kind", std::string(to_string(a.kind))}, {"start", a.start}, {"end", a.end}, {"to", {a.to.x, a.to.y}}};
  if (a.kind == ActionKind::Travel) j["from"] = {a.from.x, a.from.y};
  if (a.count != 0) j["count"] = a.count;
  if (a.target >= 0) j["target"] = a.target;
}

inline void from_json(const nlohmann::json& j, Action& a) {
  auto kind = parse_action_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(Errc::InvalidArgument, "unknown action kind " + j.at("kind").dump());
  a = Action{};
  a.kind = *kind;
  a.start = j.at("start").get<double>();
  a.end = j.at("end").get<double>();
  a.to = {j.at("to").at(0).get<double>(), j.at("to").at(1).get<double>()};
  if (j.contains("from")) a.from = {j.at("from").at(0).get<double>(), j.at("from").at(1).get<double>()};
  a.count = j.value("count", 0);
  a.target = j.value("target", -1);
}

inline void to_json(nlohmann::json& j, const Plan& p) {
  j = nlohmann::json::object();
  j["planner"] = p.planner;
  j["timelines"] = nlohmann::json::array();
  for (const auto& t : p.timelines) {
    j["timelines"].push_back({{"robot", t.robot}, {"actions", t.actions}, {"loads", t.loads}});
  }
  j["ledger"] = nlohmann::json::array();
  for (const auto& [relay, events] : p.ledger.events) {
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& e : events) {
      ev.push_back({{"kind", e.kind == LedgerEvent::Kind::Drop ? "drop" : "pick"},
                    {"time", e.time},
                    {"count", e.count},
                    {"robot", e.robot}});
    }
    j["ledger"].push_back({{"relay", relay}, {"events", ev}});
  }
}

inline void from_json(const nlohmann::json& j, Plan& p) {
  p = Plan{};
  p.planner = j.value("planner", std::string());
  for (const auto& t : j.at("timelines")) {
    Timeline tl;
    tl.robot = t.at("robot").get<RobotId>();
    tl.actions = t.at("actions").get<std::vector<Action>>();
    tl.loads = t.at("loads").get<std::vector<int>>();
    p.timelines.push_back(std::move(tl));
  }
  for (const auto& r : j.at("ledger")) {
    auto relay = r.at("relay").get<RelayId>();
    for (const auto& e : r.at("events")) {
      p.ledger.record(relay, {e.at("kind").get<std::string>() == "drop" ? LedgerEvent::Kind::Drop
                                                                        : LedgerEvent::Kind::Pick,
                              e.at("time").get<double>(), e.at("count").get<int>(), e.at("robot").get<RobotId>()});
    }
  }
}

}  // namespace vcst
