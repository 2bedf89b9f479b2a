#pragma once

// Dreyfus-Wagner exact Steiner tree for small instances. Used as a reference
// for the trunk heuristic.

#include <set>
#include <utility>
#include <vector>

#include "vcst/transport_graph.hpp"

namespace vcst {

struct SteinerTree {
  std::vector<std::pair<NodeId, NodeId>> edges;  // (u, w) with u < w
  double cost = 0.0;
};

inline constexpr std::size_t kExactMaxTerminals = 8;
inline constexpr std::size_t kExactMaxNodes = 15;

inline SteinerTree exact_steiner(const TransportGraph& g, std::size_t max_nodes = kExactMaxNodes) {
  const std::size_t n = g.size();
  std::vector<NodeId> terminals;
  for (NodeId u = 0; u < static_cast<NodeId>(n); ++u) {
    if (g.is_terminal(u)) terminals.push_back(u);
  }
  if (n > max_nodes || terminals.size() > kExactMaxTerminals) {
    throw Error(Errc::InstanceTooLarge, std::to_string(n) + " nodes / " + std::to_string(terminals.size()) +
                                            " terminals exceeds the exact solver limit");
  }
  if (terminals.size() < 2) return {};

  // All-pairs shortest costs and successor table under the symmetric view.
  std::vector<std::vector<double>> dist(n);
  for (std::size_t u = 0; u < n; ++u) dist[u] = costs_from(g, static_cast<NodeId>(u), CostView::Undirected);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t w = 0; w < n; ++w) {
      if (dist[u][w] == kInf) throw Error(Errc::DisconnectedGraph, "graph is not connected");
    }
  }

  // dp[mask][v]: cheapest tree joining terminals in mask (over terminals
  // 1..k-1) together with node v. The root terminal is terminals[0].
  const std::size_t k = terminals.size() - 1;
  const std::size_t full = (std::size_t{1} << k) - 1;
  std::vector<std::vector<double>> dp(full + 1, std::vector<double>(n, kInf));
  // Back-pointers: split submask (0 = none) or the node joined by a path.
  std::vector<std::vector<std::size_t>> split(full + 1, std::vector<std::size_t>(n, 0));
  std::vector<std::vector<int>> via(full + 1, std::vector<int>(n, -1));

  for (std::size_t t = 0; t < k; ++t) {
    std::size_t mask = std::size_t{1} << t;
    auto term = static_cast<std::size_t>(terminals[t + 1]);
    for (std::size_t v = 0; v < n; ++v) {
      dp[mask][v] = dist[term][v];
      via[mask][v] = static_cast<int>(term);
    }
  }

  for (std::size_t mask = 1; mask <= full; ++mask) {
    if ((mask & (mask - 1)) == 0) continue;
    std::vector<double> merged(n, kInf);
    std::vector<std::size_t> merged_split(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
        if (sub < (mask ^ sub)) continue;  // each split once
        double c = dp[sub][v] + dp[mask ^ sub][v];
        if (c < merged[v]) {
          merged[v] = c;
          merged_split[v] = sub;
        }
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t u = 0; u < n; ++u) {
        double c = merged[u] + dist[u][v];
        if (c < dp[mask][v]) {
          dp[mask][v] = c;
          split[mask][v] = merged_split[u];
          via[mask][v] = static_cast<int>(u);
        }
      }
    }
  }

  SteinerTree tree;
  const auto root = static_cast<std::size_t>(terminals[0]);
  tree.cost = dp[full][root];

  std::set<std::pair<NodeId, NodeId>> edges;
  auto add_path = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    Path p = shortest_path(g, static_cast<NodeId>(a), static_cast<NodeId>(b), CostView::Undirected);
    for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) edges.insert(std::minmax(p.nodes[i], p.nodes[i + 1]));
  };
  std::vector<std::pair<std::size_t, std::size_t>> work{{full, root}};
  while (!work.empty()) {
    auto [mask, v] = work.back();
    work.pop_back();
    auto u = static_cast<std::size_t>(via[mask][v]);
    add_path(u, v);
    if ((mask & (mask - 1)) == 0) continue;
    std::size_t sub = split[mask][v];
    work.push_back({sub, u});
    work.push_back({mask ^ sub, u});
  }
  tree.edges.assign(edges.begin(), edges.end());
  return tree;
}

}  // namespace vcst
