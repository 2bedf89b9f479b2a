#pragma once

// Plan validation (physics, capacity, causality, completeness) and the fleet
// metrics: total distance, packages per km, makespan and active makespan.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "vcst/plan.hpp"
#include "vcst/scenario.hpp"

namespace vcst {

enum class ViolationKind {
  TimeGap,
  NegativeDuration,
  TravelDuration,
  ServiceDuration,
  PositionMismatch,
  CapacityViolation,
  LoadAccounting,
  CausalityViolation,
  DeliveryMissing,
  DeliveryDuplicate,
  UnknownTarget,
  FlowMismatch,
  LedgerMismatch,
  UnknownRobot,
};

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::TimeGap: return "TimeGap";
    case ViolationKind::NegativeDuration: return "NegativeDuration";
    case ViolationKind::TravelDuration: return "TravelDuration";
    case ViolationKind::ServiceDuration: return "ServiceDuration";
    case ViolationKind::PositionMismatch: return "PositionMismatch";
    case ViolationKind::CapacityViolation: return "CapacityViolation";
    case ViolationKind::LoadAccounting: return "LoadAccounting";
    case ViolationKind::CausalityViolation: return "CausalityViolation";
    case ViolationKind::DeliveryMissing: return "DeliveryMissing";
    case ViolationKind::DeliveryDuplicate: return "DeliveryDuplicate";
    case ViolationKind::UnknownTarget: return "UnknownTarget";
    case ViolationKind::FlowMismatch: return "FlowMismatch";
    case ViolationKind::LedgerMismatch: return "LedgerMismatch";
    case ViolationKind::UnknownRobot: return "UnknownRobot";
  }
  return "Unknown";
}

struct Violation {
  ViolationKind kind;
  RobotId robot = -1;
  int action = -1;
  std::string detail;
};

inline constexpr double kTravelTimeTol = 1e-9;  // seconds

/// Expected throughput per relay id, used to check that the plan realizes the
/// trunk flows.
using RelayThroughput = std::map<RelayId, int>;

/// Replays every timeline independently of the planner. The relay buffers are
/// rebuilt from the actions and compared with the supplied ledger.
inline std::vector<Violation> validate(const Plan& plan, const Scenario& sc,
                                       const RelayThroughput* expected = nullptr) {
  std::vector<Violation> out;
  auto report = [&](ViolationKind k, RobotId r, int a, std::string msg) { out.push_back({k, r, a, std::move(msg)}); };

  std::vector<int> delivered(sc.goals.size(), 0);
  RelayLedger replay;
  std::map<RelayId, Point> relay_pos;

  for (const auto& tl : plan.timelines) {
    if (tl.robot < 0 || static_cast<std::size_t>(tl.robot) >= sc.robots.size()) {
      report(ViolationKind::UnknownRobot, tl.robot, -1, "timeline for unknown robot");
      continue;
    }
    const Robot& robot = sc.robots[static_cast<std::size_t>(tl.robot)];
    if (tl.loads.size() != tl.actions.size()) {
      report(ViolationKind::LoadAccounting, tl.robot, -1, "load trajectory length differs from action count");
      continue;
    }
    Point pos = robot.position;
    double clock = 0.0;
    int load = 0;
    for (std::size_t k = 0; k < tl.actions.size(); ++k) {
      const Action& a = tl.actions[k];
      const int ai = static_cast<int>(k);
      if (k == 0 ? a.start < 0.0 : a.start != clock) {
        report(ViolationKind::TimeGap, tl.robot, ai, "action does not start when the previous one ends");
      }
      if (a.end < a.start) report(ViolationKind::NegativeDuration, tl.robot, ai, "end precedes start");
      clock = a.end;

      int expected_load = load;
      if (a.kind == ActionKind::Travel) {
        if (!(a.from == pos)) report(ViolationKind::PositionMismatch, tl.robot, ai, "travel does not start at robot");
        double want = distance(a.from, a.to) / robot.speed;
        if (std::abs(a.duration() - want) > kTravelTimeTol) {
          report(ViolationKind::TravelDuration, tl.robot, ai, "travel time differs from distance / speed");
        }
        pos = a.to;
      } else {
        if (!(a.to == pos)) report(ViolationKind::PositionMismatch, tl.robot, ai, "service away from robot position");
        if (a.kind != ActionKind::Wait && a.end != a.start + sc.t_service) {
          report(ViolationKind::ServiceDuration, tl.robot, ai, "service time differs from T_s");
        }
        switch (a.kind) {
          case ActionKind::Pickup:
            if (!(pos == sc.source)) report(ViolationKind::PositionMismatch, tl.robot, ai, "pickup away from source");
            if (a.count < 1) report(ViolationKind::LoadAccounting, tl.robot, ai, "empty pickup");
            expected_load += a.count;
            break;
          case ActionKind::RelayDrop:
          case ActionKind::RelayPick: {
            auto [it, fresh] = relay_pos.try_emplace(a.target, pos);
            if (!fresh && !(it->second == pos)) {
              report(ViolationKind::PositionMismatch, tl.robot, ai, "relay visited at two positions");
            }
            if (a.count < 1) report(ViolationKind::LoadAccounting, tl.robot, ai, "empty relay transfer");
            bool drop = a.kind == ActionKind::RelayDrop;
            replay.record(a.target, {drop ? LedgerEvent::Kind::Drop : LedgerEvent::Kind::Pick,
                                     drop ? a.end : a.start, a.count, tl.robot});
            expected_load += drop ? -a.count : a.count;
            break;
          }
          case ActionKind::Deliver: {
            if (a.target < 0 || static_cast<std::size_t>(a.target) >= sc.goals.size()) {
              report(ViolationKind::UnknownTarget, tl.robot, ai, "delivery to unknown goal");
            } else {
              if (!(pos == sc.goals[static_cast<std::size_t>(a.target)])) {
                report(ViolationKind::PositionMismatch, tl.robot, ai, "delivery away from goal");
              }
              ++delivered[static_cast<std::size_t>(a.target)];
            }
            expected_load -= 1;
            break;
          }
          default:
            break;
        }
      }
      if (expected_load < 0) report(ViolationKind::LoadAccounting, tl.robot, ai, "load drops below zero");
      if (expected_load > robot.capacity) {
        report(ViolationKind::CapacityViolation, tl.robot, ai,
               "load " + std::to_string(expected_load) + " exceeds capacity " + std::to_string(robot.capacity));
      }
      if (tl.loads[k] != expected_load) {
        report(ViolationKind::LoadAccounting, tl.robot, ai, "recorded load differs from replay");
      }
      load = expected_load;
    }
    if (load != 0) report(ViolationKind::LoadAccounting, tl.robot, -1, "robot finishes with packages on board");
  }

  for (std::size_t g = 0; g < delivered.size(); ++g) {
    if (delivered[g] == 0) report(ViolationKind::DeliveryMissing, -1, -1, "goal " + std::to_string(g) + " not served");
    if (delivered[g] > 1) report(ViolationKind::DeliveryDuplicate, -1, -1, "goal " + std::to_string(g) + " served twice");
  }

  // Causality: walking each relay's events in time order (drops completing at
  // t count for picks starting at t), the buffer never goes negative.
  for (const auto& [relay, events] : replay.events) {
    auto sorted = events;
    std::stable_sort(sorted.begin(), sorted.end(), [](const LedgerEvent& a, const LedgerEvent& b) {
      if (a.time != b.time) return a.time < b.time;
      return a.kind == LedgerEvent::Kind::Drop && b.kind == LedgerEvent::Kind::Pick;
    });
    int buffer = 0;
    for (const auto& e : sorted) {
      buffer += e.kind == LedgerEvent::Kind::Drop ? e.count : -e.count;
      if (buffer < 0) {
        report(ViolationKind::CausalityViolation, e.robot, -1,
               "relay " + std::to_string(relay) + " picked before packages were dropped");
        break;
      }
    }
    if (buffer > 0) report(ViolationKind::FlowMismatch, -1, -1, "relay " + std::to_string(relay) + " left non-empty");
  }

  auto normalized = [](RelayLedger l) {
    for (auto& [_, ev] : l.events) {
      std::sort(ev.begin(), ev.end(), [](const LedgerEvent& a, const LedgerEvent& b) {
        return std::tie(a.time, a.kind, a.robot, a.count) < std::tie(b.time, b.kind, b.robot, b.count);
      });
    }
    return l;
  };
  if (!(normalized(replay) == normalized(plan.ledger))) {
    report(ViolationKind::LedgerMismatch, -1, -1, "ledger differs from the relay actions in the timelines");
  }

  if (expected != nullptr) {
    for (const auto& [relay, want] : *expected) {
      if (replay.dropped(relay) != want || replay.picked(relay) != want) {
        report(ViolationKind::FlowMismatch, -1, -1,
               "relay " + std::to_string(relay) + " moved " + std::to_string(replay.dropped(relay)) + "/" +
                   std::to_string(replay.picked(relay)) + " packages, trunk flow is " + std::to_string(want));
      }
    }
    for (const auto& [relay, _] : replay.events) {
      if (!expected->contains(relay)) {
        report(ViolationKind::FlowMismatch, -1, -1, "relay " + std::to_string(relay) + " is not on the trunk");
      }
    }
  }
  return out;
}

struct PlanMetrics {
  double total_distance_km = 0.0;
  double packages_per_km = 0.0;
  double makespan_min = 0.0;
  double active_makespan_min = 0.0;
  std::vector<double> per_robot_distance_km;
  int delivered = 0;
  int n_waits = 0;
  double wait_time_s = 0.0;
  int n_relays_used = 0;
};

/// Metrics of a plan that has already passed validation.
inline PlanMetrics compute_metrics_unchecked(const Plan& plan) {
  PlanMetrics m;
  double makespan_s = 0.0;
  double active_s = 0.0;
  for (const auto& tl : plan.timelines) {
    double meters = 0.0;
    double waits = 0.0;
    for (const auto& a : tl.actions) {
      if (a.kind == ActionKind::Travel) meters += a.length();
      if (a.kind == ActionKind::Deliver) ++m.delivered;
      if (a.kind == ActionKind::Wait) {
        waits += a.duration();
        if (a.duration() > 0.0) ++m.n_waits;
      }
    }
    m.per_robot_distance_km.push_back(meters / 1000.0);
    m.wait_time_s += waits;
    if (!tl.actions.empty()) {
      makespan_s = std::max(makespan_s, tl.end_time());
      active_s = std::max(active_s, tl.end_time() - waits);
    }
  }
  for (double d : m.per_robot_distance_km) m.total_distance_km += d;
  m.packages_per_km = m.total_distance_km > 0.0 ? m.delivered / m.total_distance_km : 0.0;
  m.makespan_min = makespan_s / 60.0;
  m.active_makespan_min = active_s / 60.0;
  m.n_relays_used = static_cast<int>(plan.ledger.events.size());
  return m;
}

/// Throws UnvalidatedInput when the plan does not pass validate().
inline PlanMetrics compute_metrics(const Plan& plan, const Scenario& sc) {
  auto violations = validate(plan, sc);
  if (!violations.empty()) {
    throw Error(Errc::UnvalidatedInput, std::to_string(violations.size()) + " violation(s), first: " +
                                            std::string(to_string(violations.front().kind)) + " " +
                                            violations.front().detail);
  }
  return compute_metrics_unchecked(plan);
}

}  // namespace vcst
