#pragma once

// Stage 2: compiles trunk flows into per-robot timelines.
//
// Every relay on the trunk is a hub owned by one receiver robot; the source is
// the hub of the pickup robot. A hub's owner repeatedly loads up to C packages
// at the hub and visits its stops: downstream relays (drop) and the goals whose
// last hub on the trunk path is this one (deliver). Hubs are processed in trunk
// preorder, so every drop a receiver waits for is already scheduled.

#include <algorithm>
#include <map>
#include <span>
#include <vector>

#include "vcst/geometry.hpp"
#include "vcst/plan.hpp"
#include "vcst/scenario.hpp"
#include "vcst/steiner_trunk.hpp"
#include "vcst/transport_graph.hpp"

namespace vcst {

struct Visit {
  NodeId node = -1;
  int count = 0;

  friend bool operator==(const Visit&, const Visit&) = default;
};

/// One departure from a hub carrying at most C packages.
struct PickupTour {
  NodeId hub = -1;
  std::vector<Visit> visits;

  int load() const {
    int sum = 0;
    for (const auto& v : visits) sum += v.count;
    return sum;
  }
};

/// Nearest proper ancestor that is the source or a relay; -1 for the source.
inline NodeId hub_parent(const RelayTrunk& trunk, NodeId node) {
  NodeId v = trunk.parent(node);
  while (v >= 0) {
    const TrunkNode* n = trunk.find(v);
    if (n->kind != NodeKind::Goal) return v;
    v = trunk.parent(v);
  }
  return -1;
}

inline bool is_hub(const TrunkNode& n) { return n.kind != NodeKind::Goal; }

/// Stops served from `hub` in trunk preorder.
inline std::vector<Visit> hub_stops(const RelayTrunk& trunk, NodeId hub) {
  std::vector<Visit> out;
  for (NodeId v : trunk.dfs_order()) {
    if (v == hub || hub_parent(trunk, v) != hub) continue;
    const TrunkNode* n = trunk.find(v);
    out.push_back({v, n->kind == NodeKind::Relay ? trunk.inflow(v) : 1});
  }
  return out;
}

/// Greedy bin fill in sequence order; a stop's demand is split across tours
/// when it does not fit.
inline std::vector<PickupTour> fill_batches(NodeId hub, std::span<const Visit> sequence, int capacity) {
  if (capacity < 1) throw Error(Errc::ZeroCapacity, "capacity must be at least 1");
  std::vector<PickupTour> tours;
  PickupTour cur{hub, {}};
  int space = capacity;
  for (const auto& stop : sequence) {
    int left = stop.count;
    while (left > 0) {
      int take = std::min(left, space);
      cur.visits.push_back({stop.node, take});
      left -= take;
      space -= take;
      if (space == 0) {
        tours.push_back(std::move(cur));
        cur = PickupTour{hub, {}};
        space = capacity;
      }
    }
  }
  if (!cur.visits.empty()) tours.push_back(std::move(cur));
  return tours;
}

/// Source departures of the pickup robot, visiting first-hop stops in trunk
/// depth-first order.
inline std::vector<PickupTour> plan_batches(const RelayTrunk& trunk, int capacity) {
  if (capacity < 1) throw Error(Errc::ZeroCapacity, "capacity must be at least 1");
  if (trunk.outflow(trunk.source()) != static_cast<int>(trunk.goal_count())) {
    throw Error(Errc::InvalidArgument, "trunk flows have not been routed");
  }
  auto stops = hub_stops(trunk, trunk.source());
  return fill_batches(trunk.source(), stops, capacity);
}

/// Robot whose Voronoi cell contains the source; ties go to the lowest id.
inline RobotId select_pickup_robot(std::span<const Robot> robots, Point source) {
  if (robots.empty()) throw Error(Errc::NoRobots, "fleet is empty");
  std::vector<Point> sites;
  for (const auto& r : robots) sites.push_back(r.position);
  return robots[static_cast<std::size_t>(nearest_sites(source, sites).front())].id;
}

inline constexpr double kDefaultWorkloadWeight = 1.0;  // seconds per assigned package

/// Greedy receiver assignment. Relays are taken in decreasing demand (ties by
/// node id); each goes to the robot minimizing travel time from its start
/// position plus workload_weight times packages already assigned to it. The
/// pickup robot only receives when it is the only robot.
inline std::map<NodeId, RobotId> assign_relays(const RelayTrunk& trunk, std::span<const Robot> robots,
                                               RobotId pickup, double speed,
                                               double workload_weight = kDefaultWorkloadWeight) {
  if (robots.empty()) throw Error(Errc::NoRobots, "fleet is empty");
  std::vector<std::pair<int, NodeId>> relays;
  for (const auto& n : trunk.nodes()) {
    if (n.kind == NodeKind::Relay && trunk.outflow(n.id) > 0) relays.push_back({trunk.outflow(n.id), n.id});
  }
  std::sort(relays.begin(), relays.end(), [](auto a, auto b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });

  std::vector<const Robot*> candidates;
  for (const auto& r : robots) {
    if (r.id != pickup) candidates.push_back(&r);
  }
  if (candidates.empty()) {
    for (const auto& r : robots) candidates.push_back(&r);
  }

  std::map<RobotId, int> workload;
  std::map<NodeId, RobotId> out;
  for (auto [demand, relay] : relays) {
    Point pos = trunk.find(relay)->position;
    const Robot* best = nullptr;
    double best_score = kInf;
    for (const Robot* r : candidates) {
      double score = distance(r->position, pos) / speed + workload_weight * workload[r->id];
      if (score < best_score || (score == best_score && best && r->id < best->id)) {
        best = r;
        best_score = score;
      }
    }
    out[relay] = best->id;
    workload[best->id] += demand;
  }
  return out;
}

/// Visiting order from `start`: preorder of the Euclidean MST over
/// {start} + points, children taken nearest first. Returns indices into points.
inline std::vector<std::size_t> mst_preorder(Point start, std::span<const Point> points) {
  const std::size_t n = points.size() + 1;
  auto at = [&](std::size_t k) { return k == 0 ? start : points[k - 1]; };
  std::vector<double> best(n, kInf);
  std::vector<std::size_t> link(n, 0);
  std::vector<bool> in(n, false);
  std::vector<std::vector<std::size_t>> children(n);
  best[0] = 0.0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t u = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (!in[k] && (u == n || best[k] < best[u])) u = k;
    }
    in[u] = true;
    if (u != 0) children[link[u]].push_back(u);
    for (std::size_t k = 0; k < n; ++k) {
      double d = distance(at(u), at(k));
      if (!in[k] && d < best[k]) {
        best[k] = d;
        link[k] = u;
      }
    }
  }
  std::vector<std::size_t> order;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    if (u != 0) order.push_back(u - 1);
    auto ch = children[u];
    std::sort(ch.begin(), ch.end(), [&](std::size_t a, std::size_t b) {
      double da = distance(at(u), at(a));
      double db = distance(at(u), at(b));
      return da != db ? da < db : a < b;
    });
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

/// Weight of the Euclidean MST over the given points.
inline double euclidean_mst_weight(std::span<const Point> points) {
  if (points.size() < 2) return 0.0;
  const std::size_t n = points.size();
  std::vector<double> best(n, kInf);
  std::vector<bool> in(n, false);
  best[0] = 0.0;
  double total = 0.0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t u = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (!in[k] && (u == n || best[k] < best[u])) u = k;
    }
    in[u] = true;
    total += best[u];
    for (std::size_t k = 0; k < n; ++k) {
      if (!in[k]) best[k] = std::min(best[k], distance(points[u], points[k]));
    }
  }
  return total;
}

struct DeliveryGroup {
  RobotId robot = -1;
  NodeId start = -1;          // relay hub the goals are collected from
  std::vector<NodeId> goals;  // visiting order
};

/// Delivery orders for every relay hub. Goals with no relay on their trunk
/// path are served by the pickup robot's source tours (plan_batches).
inline std::vector<DeliveryGroup> plan_deliveries(const RelayTrunk& trunk,
                                                  const std::map<NodeId, RobotId>& assignment) {
  std::vector<DeliveryGroup> out;
  for (NodeId hub : trunk.dfs_order()) {
    const TrunkNode* h = trunk.find(hub);
    if (h->kind != NodeKind::Relay) continue;
    DeliveryGroup group{assignment.at(hub), hub, {}};
    std::vector<NodeId> goals;
    std::vector<Point> pts;
    for (const auto& s : hub_stops(trunk, hub)) {
      const TrunkNode* n = trunk.find(s.node);
      if (n->kind == NodeKind::Goal) {
        goals.push_back(s.node);
        pts.push_back(n->position);
      }
    }
    for (std::size_t k : mst_preorder(h->position, pts)) group.goals.push_back(goals[k]);
    out.push_back(std::move(group));
  }
  return out;
}

/// Integrates source batches, relay hand-offs and delivery tours into
/// timelines. Relays are asynchronous: a receiver that arrives before the
/// packages it needs have been dropped waits at the relay.
inline Plan synthesize_timelines(const RelayTrunk& trunk, std::span<const PickupTour> batches,
                                 const std::map<NodeId, RobotId>& assignment,
                                 std::span<const DeliveryGroup> deliveries, const Scenario& scenario,
                                 RobotId pickup) {
  std::vector<TimelineBuilder> builders;
  for (const auto& r : scenario.robots) builders.emplace_back(r.id, r.position, r.speed, scenario.t_service);
  auto builder = [&](RobotId id) -> TimelineBuilder& {
    if (id < 0 || static_cast<std::size_t>(id) >= builders.size()) {
      throw Error(Errc::InfeasiblePlan, "robot " + std::to_string(id) + " does not exist");
    }
    return builders[static_cast<std::size_t>(id)];
  };
  auto node = [&](NodeId id) -> const TrunkNode& { return *trunk.find(id); };

  RelayLedger ledger;
  for (NodeId hub : trunk.dfs_order()) {
    const TrunkNode& h = node(hub);
    if (!is_hub(h)) continue;

    std::vector<PickupTour> tours;
    RobotId owner;
    if (h.kind == NodeKind::Source) {
      owner = pickup;
      tours.assign(batches.begin(), batches.end());
    } else {
      auto it = assignment.find(hub);
      if (it == assignment.end()) throw Error(Errc::InfeasiblePlan, "relay without receiver");
      owner = it->second;
      std::vector<Visit> sequence;
      for (const auto& s : hub_stops(trunk, hub)) {
        if (node(s.node).kind == NodeKind::Relay) sequence.push_back(s);
      }
      auto group = std::find_if(deliveries.begin(), deliveries.end(),
                                [&](const DeliveryGroup& g) { return g.start == hub; });
      if (group != deliveries.end()) {
        for (NodeId g : group->goals) sequence.push_back({g, 1});
      }
      tours = fill_batches(hub, sequence, scenario.robots[static_cast<std::size_t>(owner)].capacity);
    }

    TimelineBuilder& b = builder(owner);
    const int capacity = scenario.robots[static_cast<std::size_t>(owner)].capacity;
    int picked = 0;
    for (const auto& tour : tours) {
      const int load = tour.load();
      if (b.load() != 0 || load > capacity) throw Error(Errc::InfeasiblePlan, "tour exceeds capacity");
      b.travel_to(h.position);
      if (h.kind == NodeKind::Source) {
        b.pickup(load);
      } else {
        auto ready = ledger.time_available(h.ref, picked + load);
        if (!ready) throw Error(Errc::InfeasiblePlan, "relay pick has no matching drop");
        b.wait_until(*ready);
        ledger.record(h.ref, {LedgerEvent::Kind::Pick, b.time(), load, owner});
        b.relay_pick(h.ref, load);
        picked += load;
      }
      for (const auto& v : tour.visits) {
        const TrunkNode& stop = node(v.node);
        b.travel_to(stop.position);
        if (stop.kind == NodeKind::Relay) {
          b.relay_drop(stop.ref, v.count);
          ledger.record(stop.ref, {LedgerEvent::Kind::Drop, b.time(), v.count, owner});
        } else {
          b.deliver(stop.ref);
        }
      }
    }
  }

  Plan plan;
  plan.planner = "vcst";
  for (auto& b : builders) plan.timelines.push_back(b.take());
  plan.ledger = std::move(ledger);
  return plan;
}

struct VcstOptions {
  std::optional<double> service_weight;  // defaults to the scenario's service time
  EdgeRule edge_rule = EdgeRule::SharedCell;
  double workload_weight = kDefaultWorkloadWeight;
};

/// Everything the two stages produce for one scenario.
struct VcstResult {
  std::vector<VoronoiCell> cells;
  std::vector<RelayCandidate> relays;
  RelayTrunk trunk;
  RobotId pickup = 0;
  std::vector<PickupTour> batches;
  std::map<NodeId, RobotId> assignment;
  std::vector<DeliveryGroup> deliveries;
  Plan plan;
};

inline void check_fleet(const Scenario& sc) {
  if (sc.robots.empty()) throw Error(Errc::NoRobots, "fleet is empty");
  for (std::size_t k = 0; k < sc.robots.size(); ++k) {
    if (sc.robots[k].id != static_cast<RobotId>(k)) {
      throw Error(Errc::InvalidArgument, "robot ids must equal their index");
    }
    if (sc.robots[k].capacity < 1) throw Error(Errc::ZeroCapacity, "robot capacity must be at least 1");
    if (!(sc.robots[k].speed > 0.0)) throw Error(Errc::InvalidArgument, "robot speed must be positive");
  }
}

inline VcstResult plan_vcst(const Scenario& sc, const VcstOptions& opts = {}) {
  check_fleet(sc);
  if (sc.goals.empty()) throw Error(Errc::EmptyGoals, "scenario has no goals");
  VcstResult out;
  const auto sites = sc.robot_positions();
  out.cells = compute_voronoi(sites, sc.workspace);
  out.relays = relay_candidates(out.cells);
  GraphOptions gopts{sc.speed(), opts.service_weight.value_or(sc.t_service), opts.edge_rule};
  auto graph = build_graph(sc.source, sc.goals, out.relays, gopts, sites);
  out.trunk = route_demands(build_trunk(graph));
  out.pickup = select_pickup_robot(sc.robots, sc.source);
  out.batches = plan_batches(out.trunk, sc.robots[static_cast<std::size_t>(out.pickup)].capacity);
  out.assignment = assign_relays(out.trunk, sc.robots, out.pickup, sc.speed(), opts.workload_weight);
  out.deliveries = plan_deliveries(out.trunk, out.assignment);
  out.plan = synthesize_timelines(out.trunk, out.batches, out.assignment, out.deliveries, sc, out.pickup);
  return out;
}

}  // namespace vcst
