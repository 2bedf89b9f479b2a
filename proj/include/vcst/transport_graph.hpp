#pragma once

// Transport graph over {source} + goals + relay candidates. Edge cost is travel
// time plus a weighted service count charged on arrival at a relay or goal.

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "vcst/core.hpp"
#include "vcst/geometry.hpp"

namespace vcst {

enum class NodeKind { Source, Goal, Relay };

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Source: return "source";
    case NodeKind::Goal: return "goal";
    case NodeKind::Relay: return "relay";
  }
  return "unknown";
}

struct GraphNode {
  NodeKind kind = NodeKind::Source;
  int ref = -1;  // goal id or relay candidate id; -1 for the source
  Point position;
};

enum class EdgeRule {
  Complete,    // every pair of nodes is joined
  SharedCell,  // nodes are joined only when they lie in a common Voronoi cell
};

struct GraphOptions {
  double speed = 5.0;           // m/s
  double service_weight = 5.0;  // seconds per service event
  EdgeRule rule = EdgeRule::Complete;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class TransportGraph {
 public:
  TransportGraph(std::vector<GraphNode> nodes, double speed, double service_weight)
      : nodes_(std::move(nodes)),
        speed_(speed),
        service_weight_(service_weight),
        adjacent_(nodes_.size() * nodes_.size(), false),
        cost_(nodes_.size() * nodes_.size(), kInf) {
    if (!(speed > 0.0)) throw Error(Errc::InvalidArgument, "speed must be positive");
    if (!(service_weight >= 0.0)) throw Error(Errc::InvalidArgument, "service weight must be non-negative");
  }

  std::size_t size() const { return nodes_.size(); }
  const GraphNode& node(NodeId u) const {
    check(u);
    return nodes_[static_cast<std::size_t>(u)];
  }
  std::span<const GraphNode> nodes() const { return nodes_; }
  double speed() const { return speed_; }
  double service_weight() const { return service_weight_; }
  NodeId source() const { return 0; }

  std::size_t goal_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const GraphNode& n) { return n.kind == NodeKind::Goal; }));
  }

  bool is_terminal(NodeId u) const { return node(u).kind != NodeKind::Relay; }

  /// Service events charged when arriving at w.
  int service_count(NodeId /*u*/, NodeId w) const { return node(w).kind == NodeKind::Source ? 0 : 1; }

  /// Recomputes c(u,w) from positions, whether or not the edge is stored.
  double edge_cost_formula(NodeId u, NodeId w) const {
    return distance(node(u).position, node(w).position) / speed_ + service_weight_ * service_count(u, w);
  }

  void add_edge(NodeId u, NodeId w) {
    check(u);
    check(w);
    if (u == w) return;
    adjacent_[index(u, w)] = adjacent_[index(w, u)] = true;
    cost_[index(u, w)] = edge_cost_formula(u, w);
    cost_[index(w, u)] = edge_cost_formula(w, u);
  }

  bool has_edge(NodeId u, NodeId w) const { return adjacent_[index(u, w)]; }

  /// Directed cost c(u,w); infinite when no edge is stored.
  double cost(NodeId u, NodeId w) const { return cost_[index(u, w)]; }

  /// Cost with the edge oriented away from the source. Every edge of a tree
  /// rooted at the source arrives at a service location under this convention.
  double undirected_cost(NodeId u, NodeId w) const {
    return u < w ? cost(u, w) : cost(w, u);
  }

  std::vector<NodeId> neighbors(NodeId u) const {
    std::vector<NodeId> out;
    for (NodeId w = 0; w < static_cast<NodeId>(size()); ++w) {
      if (has_edge(u, w)) out.push_back(w);
    }
    return out;
  }

  bool connected() const {
    if (nodes_.empty()) return true;
    std::vector<bool> seen(size(), false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId w : neighbors(u)) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = true;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == size();
  }

  std::optional<NodeId> find(NodeKind kind, int ref) const {
    for (std::size_t u = 0; u < nodes_.size(); ++u) {
      if (nodes_[u].kind == kind && nodes_[u].ref == ref) return static_cast<NodeId>(u);
    }
    return std::nullopt;
  }

  void check(NodeId u) const {
    if (u < 0 || static_cast<std::size_t>(u) >= nodes_.size()) {
      throw Error(Errc::NodeNotFound, "node " + std::to_string(u) + " is not in the graph");
    }
  }

 private:
  std::size_t index(NodeId u, NodeId w) const {
    return static_cast<std::size_t>(u) * nodes_.size() + static_cast<std::size_t>(w);
  }

  std::vector<GraphNode> nodes_;
  double speed_;
  double service_weight_;
  std::vector<bool> adjacent_;
  std::vector<double> cost_;
};

/// Node layout: 0 = source, 1..N = goals, N+1.. = relays in candidate order.
inline std::vector<GraphNode> make_nodes(Point source, std::span<const Point> goals,
                                         std::span<const RelayCandidate> relays) {
  std::vector<GraphNode> nodes;
  nodes.reserve(1 + goals.size() + relays.size());
  nodes.push_back({NodeKind::Source, -1, source});
  for (std::size_t g = 0; g < goals.size(); ++g) nodes.push_back({NodeKind::Goal, static_cast<int>(g), goals[g]});
  for (std::size_t r = 0; r < relays.size(); ++r) {
    nodes.push_back({NodeKind::Relay, static_cast<int>(r), relays[r].position});
  }
  return nodes;
}

/// Builds the transport graph. `sites` is required for EdgeRule::SharedCell:
/// source and goals belong to the cells of their nearest sites, each relay to
/// the two cells whose boundary it lies on.
inline TransportGraph build_graph(Point source, std::span<const Point> goals, std::span<const RelayCandidate> relays,
                                  const GraphOptions& opts, std::span<const Point> sites = {}) {
  if (goals.empty()) throw Error(Errc::EmptyGoals, "transport graph needs at least one goal");
  TransportGraph g(make_nodes(source, goals, relays), opts.speed, opts.service_weight);
  const auto n = static_cast<NodeId>(g.size());

  if (opts.rule == EdgeRule::Complete || sites.size() <= 1) {
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId w = u + 1; w < n; ++w) g.add_edge(u, w);
    }
    return g;
  }

  std::vector<std::vector<RobotId>> member(g.size());
  for (NodeId u = 0; u < n; ++u) {
    const GraphNode& node = g.node(u);
    if (node.kind == NodeKind::Relay) {
      const auto& rc = relays[static_cast<std::size_t>(node.ref)];
      member[static_cast<std::size_t>(u)] = {rc.i, rc.j};
    } else {
      member[static_cast<std::size_t>(u)] = nearest_sites(node.position, sites);
    }
  }
  auto share = [&](NodeId u, NodeId w) {
    for (RobotId a : member[static_cast<std::size_t>(u)]) {
      for (RobotId b : member[static_cast<std::size_t>(w)]) {
        if (a == b) return true;
      }
    }
    return false;
  };
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId w = u + 1; w < n; ++w) {
      if (share(u, w)) g.add_edge(u, w);
    }
  }
  return g;
}

inline TransportGraph build_graph(Point source, std::span<const Point> goals, std::span<const RelayCandidate> relays,
                                  double speed, double service_weight) {
  return build_graph(source, goals, relays, GraphOptions{speed, service_weight, EdgeRule::Complete});
}

enum class CostView {
  Directed,    // c(u,w) as stored
  Undirected,  // source-outbound orientation, symmetric
};

namespace detail {

inline double view_cost(const TransportGraph& g, NodeId u, NodeId w, CostView view) {
  return view == CostView::Directed ? g.cost(u, w) : g.undirected_cost(u, w);
}

}  // namespace detail

/// Single-source costs from u (dense Dijkstra).
inline std::vector<double> costs_from(const TransportGraph& g, NodeId u, CostView view = CostView::Directed) {
  g.check(u);
  const std::size_t n = g.size();
  std::vector<double> dist(n, kInf);
  std::vector<bool> done(n, false);
  dist[static_cast<std::size_t>(u)] = 0.0;
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t best = n;
    for (std::size_t x = 0; x < n; ++x) {
      if (!done[x] && dist[x] < kInf && (best == n || dist[x] < dist[best])) best = x;
    }
    if (best == n) break;
    done[best] = true;
    for (std::size_t y = 0; y < n; ++y) {
      if (done[y]) continue;
      double c = detail::view_cost(g, static_cast<NodeId>(best), static_cast<NodeId>(y), view);
      if (dist[best] + c < dist[y]) dist[y] = dist[best] + c;
    }
  }
  return dist;
}

/// Costs of reaching w from every node.
inline std::vector<double> costs_to(const TransportGraph& g, NodeId w, CostView view = CostView::Directed) {
  g.check(w);
  const std::size_t n = g.size();
  std::vector<double> dist(n, kInf);
  std::vector<bool> done(n, false);
  dist[static_cast<std::size_t>(w)] = 0.0;
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t best = n;
    for (std::size_t x = 0; x < n; ++x) {
      if (!done[x] && dist[x] < kInf && (best == n || dist[x] < dist[best])) best = x;
    }
    if (best == n) break;
    done[best] = true;
    for (std::size_t y = 0; y < n; ++y) {
      if (done[y]) continue;
      double c = detail::view_cost(g, static_cast<NodeId>(y), static_cast<NodeId>(best), view);
      if (c + dist[best] < dist[y]) dist[y] = c + dist[best];
    }
  }
  return dist;
}

struct Path {
  std::vector<NodeId> nodes;
  double cost = 0.0;
};

/// Minimum-cost path; among minimum-cost paths the lexicographically smallest
/// node sequence is returned.
inline Path shortest_path(const TransportGraph& g, NodeId u, NodeId w, CostView view = CostView::Directed) {
  g.check(u);
  g.check(w);
  if (u == w) return {{u}, 0.0};
  const auto from = costs_from(g, u, view);
  const auto to = costs_to(g, w, view);
  const double total = from[static_cast<std::size_t>(w)];
  if (total == kInf) throw Error(Errc::DisconnectedGraph, "no path between nodes");
  const double eps = 1e-12 * std::max(1.0, total);

  Path path{{u}, total};
  std::vector<bool> used(g.size(), false);
  used[static_cast<std::size_t>(u)] = true;
  NodeId x = u;
  while (x != w) {
    NodeId next = -1;
    for (NodeId y = 0; y < static_cast<NodeId>(g.size()); ++y) {
      if (used[static_cast<std::size_t>(y)] || !g.has_edge(x, y)) continue;
      double c = detail::view_cost(g, x, y, view);
      if (from[static_cast<std::size_t>(x)] + c + to[static_cast<std::size_t>(y)] <= total + eps) {
        next = y;
        break;
      }
    }
    if (next < 0) throw Error(Errc::DisconnectedGraph, "shortest path reconstruction failed");
    used[static_cast<std::size_t>(next)] = true;
    path.nodes.push_back(next);
    x = next;
  }
  return path;
}

}  // namespace vcst
