#pragma once

// Relay trunk construction: metric-closure MST over the terminals, expanded
// back into shortest paths of the transport graph, then unit demands routed
// from the source to every goal.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "vcst/transport_graph.hpp"

namespace vcst {

struct TrunkNode {
  NodeId id = -1;
  NodeKind kind = NodeKind::Source;
  int ref = -1;
  Point position;
};

struct TrunkEdge {
  NodeId from = -1;  // closer to the source
  NodeId to = -1;
  int flow = 0;
  double cost = 0.0;
};

class RelayTrunk {
 public:
  RelayTrunk() = default;
  RelayTrunk(std::vector<TrunkNode> nodes, std::vector<TrunkEdge> edges, std::size_t goal_count)
      : nodes_(std::move(nodes)), edges_(std::move(edges)), goal_count_(goal_count) {
    std::sort(nodes_.begin(), nodes_.end(), [](const TrunkNode& a, const TrunkNode& b) { return a.id < b.id; });
    std::sort(edges_.begin(), edges_.end(), [](const TrunkEdge& a, const TrunkEdge& b) {
      return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });
  }

  const std::vector<TrunkNode>& nodes() const { return nodes_; }
  const std::vector<TrunkEdge>& edges() const { return edges_; }
  std::vector<TrunkEdge>& mutable_edges() { return edges_; }
  std::size_t goal_count() const { return goal_count_; }

  /// Cost of the metric-closure MST before path expansion.
  double closure_mst_cost = 0.0;

  double total_cost() const {
    double sum = 0.0;
    for (const auto& e : edges_) sum += e.cost;
    return sum;
  }

  const TrunkNode* find(NodeId id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                               [](const TrunkNode& n, NodeId v) { return n.id < v; });
    return it != nodes_.end() && it->id == id ? &*it : nullptr;
  }
  bool contains(NodeId id) const { return find(id) != nullptr; }

  const TrunkEdge* edge_into(NodeId id) const {
    for (const auto& e : edges_) {
      if (e.to == id) return &e;
    }
    return nullptr;
  }

  NodeId parent(NodeId id) const {
    const TrunkEdge* e = edge_into(id);
    return e ? e->from : -1;
  }

  std::vector<NodeId> children(NodeId id) const {
    std::vector<NodeId> out;
    for (const auto& e : edges_) {
      if (e.from == id) out.push_back(e.to);
    }
    return out;  // ascending, edges are sorted
  }

  int inflow(NodeId id) const {
    const TrunkEdge* e = edge_into(id);
    return e ? e->flow : 0;
  }

  int outflow(NodeId id) const {
    int sum = 0;
    for (const auto& e : edges_) {
      if (e.from == id) sum += e.flow;
    }
    return sum;
  }

  NodeId source() const { return nodes_.empty() ? -1 : nodes_.front().id; }

  /// Preorder from the source, children visited in ascending id.
  std::vector<NodeId> dfs_order() const {
    std::vector<NodeId> order;
    if (nodes_.empty()) return order;
    std::vector<NodeId> stack{source()};
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      order.push_back(u);
      auto ch = children(u);
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return order;
  }

  std::size_t relay_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TrunkNode& n) { return n.kind == NodeKind::Relay; }));
  }

 private:
  std::vector<TrunkNode> nodes_;
  std::vector<TrunkEdge> edges_;
  std::size_t goal_count_ = 0;
};

namespace detail {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    return true;
  }
};

struct WeightedEdge {
  NodeId u;
  NodeId w;
  double weight;
};

/// Kruskal with ties broken by (u, w); u < w for every input edge.
inline std::vector<WeightedEdge> kruskal(std::size_t n, std::vector<WeightedEdge> edges) {
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return std::tie(a.weight, a.u, a.w) < std::tie(b.weight, b.u, b.w);
  });
  DisjointSets ds(n);
  std::vector<WeightedEdge> tree;
  for (const auto& e : edges) {
    if (ds.unite(e.u, e.w)) tree.push_back(e);
  }
  return tree;
}

}  // namespace detail

/// Metric-closure / MST trunk. Flows are zero until route_demands.
inline RelayTrunk build_trunk(const TransportGraph& g) {
  if (g.goal_count() == 0) throw Error(Errc::EmptyGoals, "no goals to connect");
  std::vector<NodeId> terminals;
  for (NodeId u = 0; u < static_cast<NodeId>(g.size()); ++u) {
    if (g.is_terminal(u)) terminals.push_back(u);
  }

  std::vector<detail::WeightedEdge> closure;
  for (std::size_t a = 0; a < terminals.size(); ++a) {
    auto dist = costs_from(g, terminals[a], CostView::Undirected);
    for (std::size_t b = a + 1; b < terminals.size(); ++b) {
      double d = dist[static_cast<std::size_t>(terminals[b])];
      if (d == kInf) throw Error(Errc::DisconnectedGraph, "terminals are not mutually reachable");
      closure.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b), d});
    }
  }
  auto mst = detail::kruskal(terminals.size(), closure);

  double closure_cost = 0.0;
  std::set<std::pair<NodeId, NodeId>> used;
  for (const auto& e : mst) {
    closure_cost += e.weight;
    Path p = shortest_path(g, terminals[static_cast<std::size_t>(e.u)], terminals[static_cast<std::size_t>(e.w)],
                           CostView::Undirected);
    for (std::size_t k = 0; k + 1 < p.nodes.size(); ++k) {
      used.insert(std::minmax(p.nodes[k], p.nodes[k + 1]));
    }
  }

  // Overlapping paths may close cycles; a spanning tree of the union drops the
  // most expensive edge of each cycle.
  std::vector<detail::WeightedEdge> union_edges;
  for (auto [u, w] : used) union_edges.push_back({u, w, g.undirected_cost(u, w)});
  auto tree = detail::kruskal(g.size(), union_edges);

  std::vector<std::set<NodeId>> adj(g.size());
  for (const auto& e : tree) {
    adj[static_cast<std::size_t>(e.u)].insert(e.w);
    adj[static_cast<std::size_t>(e.w)].insert(e.u);
  }
  // Relays left as leaves carry no demand.
  bool pruned = true;
  while (pruned) {
    pruned = false;
    for (NodeId u = 0; u < static_cast<NodeId>(g.size()); ++u) {
      auto& nb = adj[static_cast<std::size_t>(u)];
      if (!g.is_terminal(u) && nb.size() == 1) {
        NodeId w = *nb.begin();
        adj[static_cast<std::size_t>(w)].erase(u);
        nb.clear();
        pruned = true;
      }
    }
  }

  std::vector<TrunkNode> nodes;
  std::vector<TrunkEdge> edges;
  std::vector<bool> seen(g.size(), false);
  std::vector<NodeId> stack{g.source()};
  seen[static_cast<std::size_t>(g.source())] = true;
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    const GraphNode& gn = g.node(u);
    nodes.push_back({u, gn.kind, gn.ref, gn.position});
    for (NodeId w : adj[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      edges.push_back({u, w, 0, g.cost(u, w)});
      stack.push_back(w);
    }
  }
  for (NodeId t : terminals) {
    if (!seen[static_cast<std::size_t>(t)]) throw Error(Errc::DisconnectedGraph, "trunk does not span terminals");
  }
  RelayTrunk trunk(std::move(nodes), std::move(edges), g.goal_count());
  trunk.closure_mst_cost = closure_cost;
  return trunk;
}

/// Routes one unit of demand from the source to every goal along the tree.
inline RelayTrunk route_demands(RelayTrunk trunk) {
  for (auto& e : trunk.mutable_edges()) e.flow = 0;
  std::size_t goals_seen = 0;
  for (const auto& n : trunk.nodes()) {
    if (n.kind != NodeKind::Goal) continue;
    ++goals_seen;
    NodeId v = n.id;
    while (v != trunk.source()) {
      auto& edges = trunk.mutable_edges();
      auto it = std::find_if(edges.begin(), edges.end(), [v](const TrunkEdge& e) { return e.to == v; });
      if (it == edges.end()) {
        throw Error(Errc::GoalNotInTrunk, "goal node " + std::to_string(n.id) + " is not connected to the source");
      }
      ++it->flow;
      v = it->from;
    }
  }
  if (goals_seen != trunk.goal_count()) {
    throw Error(Errc::GoalNotInTrunk, std::to_string(trunk.goal_count() - goals_seen) + " goal(s) missing from trunk");
  }
  return trunk;
}

/// Structural and flow invariants; empty when the trunk is well formed.
inline std::vector<std::string> trunk_violations(const RelayTrunk& trunk, bool check_flows = true) {
  std::vector<std::string> out;
  const auto& nodes = trunk.nodes();
  const auto& edges = trunk.edges();
  if (nodes.empty()) return {"empty trunk"};
  if (nodes.front().kind != NodeKind::Source) out.push_back("first node is not the source");
  if (edges.size() + 1 != nodes.size()) out.push_back("edge count is not node count - 1");
  if (trunk.dfs_order().size() != nodes.size()) out.push_back("trunk is not connected from the source");
  std::size_t goals = 0;
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::Goal) ++goals;
    if (n.kind != NodeKind::Source && trunk.edge_into(n.id) == nullptr) {
      out.push_back("node " + std::to_string(n.id) + " has no parent");
    }
  }
  if (goals != trunk.goal_count()) out.push_back("trunk is missing goals");
  if (!check_flows) return out;

  const auto n_goals = static_cast<int>(trunk.goal_count());
  if (trunk.outflow(trunk.source()) != n_goals) out.push_back("source outflow differs from goal count");
  for (const auto& n : nodes) {
    int in = trunk.inflow(n.id);
    int outf = trunk.outflow(n.id);
    if (n.kind == NodeKind::Relay && in != outf) {
      out.push_back("conservation broken at relay node " + std::to_string(n.id));
    }
    if (n.kind == NodeKind::Goal && in - outf != 1) {
      out.push_back("goal node " + std::to_string(n.id) + " does not absorb exactly one unit");
    }
  }
  for (const auto& e : edges) {
    if (e.flow < 1) out.push_back("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " carries no flow");
  }
  return out;
}

inline void to_json(nlohmann::json& j, const RelayTrunk& t) {
  j = nlohmann::json::object();
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : t.nodes()) {
    j["nodes"].push_back({{"id", n.id},
                          {"kind", std::string(to_string(n.kind))},
                          {"ref", n.ref},
                          {"pos", {n.position.x, n.position.y}}});
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : t.edges()) {
    j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"flow", e.flow}, {"cost", e.cost}});
  }
  j["goal_count"] = t.goal_count();
  j["total_cost"] = t.total_cost();
  j["closure_mst_cost"] = t.closure_mst_cost;
}

inline void from_json(const nlohmann::json& j, RelayTrunk& t) {
  std::vector<TrunkNode> nodes;
  for (const auto& n : j.at("nodes")) {
    auto kind = n.at("kind").get<std::string>();
    NodeKind k = kind == "source" ? NodeKind::Source : kind == "goal" ? NodeKind::Goal : NodeKind::Relay;
    nodes.push_back({n.at("id").get<NodeId>(), k, n.at("ref").get<int>(),
                     {n.at("pos").at(0).get<double>(), n.at("pos").at(1).get<double>()}});
  }
  std::vector<TrunkEdge> edges;
  for (const auto& e : j.at("edges")) {
    edges.push_back({e.at("from").get<NodeId>(), e.at("to").get<NodeId>(), e.at("flow").get<int>(),
                     e.at("cost").get<double>()});
  }
  t = RelayTrunk(std::move(nodes), std::move(edges), j.at("goal_count").get<std::size_t>());
  t.closure_mst_cost = j.value("closure_mst_cost", 0.0);
}

}  // namespace vcst
