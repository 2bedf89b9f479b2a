#pragma once

// Direct-transport comparison planners: round-based Hungarian dispatch and a
// Clarke-Wright savings + 2-opt capacitated routing heuristic.

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <tuple>
#include <vector>

#include "vcst/plan.hpp"
#include "vcst/scenario.hpp"
#include "vcst/transport_graph.hpp"

namespace vcst {

struct Matching {
  std::vector<int> row_to_col;  // -1 for an unmatched row
  double total = 0.0;
};

namespace detail {

// Shortest augmenting path Hungarian method with potentials; rows <= cols.
inline std::vector<int> hungarian_rows_le_cols(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  const std::size_t m = a.front().size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0];
      std::size_t j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

}  // namespace detail

/// Minimum-cost assignment on a rectangular matrix; min(rows, cols) pairs.
inline Matching hungarian_assign(const std::vector<std::vector<double>>& cost) {
  if (cost.empty() || cost.front().empty()) throw Error(Errc::EmptyMatrix, "cost matrix is empty");
  const std::size_t rows = cost.size();
  const std::size_t cols = cost.front().size();
  for (const auto& row : cost) {
    if (row.size() != cols) throw Error(Errc::InvalidArgument, "cost matrix rows differ in length");
    for (double c : row) {
      if (!std::isfinite(c)) throw Error(Errc::InvalidArgument, "cost matrix entries must be finite");
    }
  }
  Matching out;
  if (rows <= cols) {
    out.row_to_col = detail::hungarian_rows_le_cols(cost);
  } else {
    std::vector<std::vector<double>> t(cols, std::vector<double>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) t[j][i] = cost[i][j];
    }
    auto col_to_row = detail::hungarian_rows_le_cols(t);
    out.row_to_col.assign(rows, -1);
    for (std::size_t j = 0; j < cols; ++j) out.row_to_col[static_cast<std::size_t>(col_to_row[j])] = static_cast<int>(j);
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (out.row_to_col[i] >= 0) out.total += cost[i][static_cast<std::size_t>(out.row_to_col[i])];
  }
  return out;
}

/// Visiting order by repeated nearest neighbour from `start`.
inline std::vector<GoalId> nearest_neighbor_order(Point start, std::vector<GoalId> goals, std::span<const Point> pos) {
  std::vector<GoalId> order;
  Point at = start;
  while (!goals.empty()) {
    auto best = goals.begin();
    for (auto it = goals.begin(); it != goals.end(); ++it) {
      double d = distance(at, pos[static_cast<std::size_t>(*it)]);
      double bd = distance(at, pos[static_cast<std::size_t>(*best)]);
      if (d < bd || (d == bd && *it < *best)) best = it;
    }
    order.push_back(*best);
    at = pos[static_cast<std::size_t>(*best)];
    goals.erase(best);
  }
  return order;
}

/// How many goals a robot takes per departure from the source.
enum class HungarianRounds {
  OnePerRobot,  // each round is a single matching of min(M, remaining) goals
  FillCapacity, // up to C successive matchings per round
};

/// Round-based Hungarian dispatch. A round is one departure from the source
/// per robot. With FillCapacity, successive matchings hand every robot at most
/// one more goal each, costed from the robot's previous assignment (the source
/// at the start of the round). Robots deliver their round in nearest-neighbour
/// order and return to the source for the next round.
inline Plan plan_hungarian(const Scenario& sc, HungarianRounds rounds = HungarianRounds::OnePerRobot) {
  if (sc.robots.empty()) throw Error(Errc::NoRobots, "fleet is empty");
  std::vector<TimelineBuilder> builders;
  for (const auto& r : sc.robots) builders.emplace_back(r.id, r.position, r.speed, sc.t_service);

  std::vector<GoalId> remaining(sc.goals.size());
  std::iota(remaining.begin(), remaining.end(), 0);
  while (!remaining.empty()) {
    std::vector<std::vector<GoalId>> round(sc.robots.size());
    std::vector<Point> anchor(sc.robots.size(), sc.source);
    while (!remaining.empty()) {
      std::vector<std::size_t> active;
      for (std::size_t m = 0; m < sc.robots.size(); ++m) {
        int limit = rounds == HungarianRounds::OnePerRobot ? 1 : sc.robots[m].capacity;
        if (static_cast<int>(round[m].size()) < limit) active.push_back(m);
      }
      if (active.empty()) break;
      std::vector<std::vector<double>> cost(active.size(), std::vector<double>(remaining.size()));
      for (std::size_t a = 0; a < active.size(); ++a) {
        for (std::size_t k = 0; k < remaining.size(); ++k) {
          cost[a][k] = distance(anchor[active[a]], sc.goals[static_cast<std::size_t>(remaining[k])]) /
                       sc.robots[active[a]].speed;
        }
      }
      auto match = hungarian_assign(cost);
      std::vector<GoalId> taken;
      for (std::size_t a = 0; a < active.size(); ++a) {
        int k = match.row_to_col[a];
        if (k < 0) continue;
        GoalId g = remaining[static_cast<std::size_t>(k)];
        round[active[a]].push_back(g);
        anchor[active[a]] = sc.goals[static_cast<std::size_t>(g)];
        taken.push_back(g);
      }
      std::erase_if(remaining, [&](GoalId g) { return std::find(taken.begin(), taken.end(), g) != taken.end(); });
    }
    for (std::size_t m = 0; m < sc.robots.size(); ++m) {
      if (round[m].empty()) continue;
      auto& b = builders[m];
      b.travel_to(sc.source);
      b.pickup(static_cast<int>(round[m].size()));
      for (GoalId g : nearest_neighbor_order(sc.source, round[m], sc.goals)) {
        b.travel_to(sc.goals[static_cast<std::size_t>(g)]);
        b.deliver(g);
      }
    }
  }

  Plan plan;
  plan.planner = rounds == HungarianRounds::OnePerRobot ? "hungarian" : "hungarian_batched";
  for (auto& b : builders) plan.timelines.push_back(b.take());
  return plan;
}

struct CvrpSolution {
  std::vector<std::vector<GoalId>> routes;  // each starts and ends at the depot
  double total_distance = 0.0;
};

inline double route_length(Point depot, const std::vector<GoalId>& route, std::span<const Point> goals) {
  if (route.empty()) return 0.0;
  double len = distance(depot, goals[static_cast<std::size_t>(route.front())]);
  for (std::size_t k = 0; k + 1 < route.size(); ++k) {
    len += distance(goals[static_cast<std::size_t>(route[k])], goals[static_cast<std::size_t>(route[k + 1])]);
  }
  return len + distance(goals[static_cast<std::size_t>(route.back())], depot);
}

namespace detail {

inline void two_opt(Point depot, std::vector<GoalId>& route, std::span<const Point> goals) {
  auto at = [&](std::size_t k) {
    return (k == 0 || k == route.size() + 1) ? depot : goals[static_cast<std::size_t>(route[k - 1])];
  };
  bool improved = true;
  while (improved) {
    improved = false;
    // Positions 0 and n+1 are the depot; reverse route positions i..j.
    for (std::size_t i = 1; i + 1 <= route.size(); ++i) {
      for (std::size_t j = i + 1; j <= route.size(); ++j) {
        double before = distance(at(i - 1), at(i)) + distance(at(j), at(j + 1));
        double after = distance(at(i - 1), at(j)) + distance(at(i), at(j + 1));
        if (after < before - 1e-12) {
          std::reverse(route.begin() + static_cast<std::ptrdiff_t>(i - 1), route.begin() + static_cast<std::ptrdiff_t>(j));
          improved = true;
        }
      }
    }
  }
}

}  // namespace detail

/// Clarke-Wright savings construction followed by 2-opt on every route.
inline CvrpSolution cvrp_heuristic(Point depot, std::span<const Point> goals, int capacity) {
  if (capacity < 1) throw Error(Errc::ZeroCapacity, "capacity must be at least 1");
  const std::size_t n = goals.size();
  std::vector<std::deque<GoalId>> routes(n);
  std::vector<std::size_t> route_of(n);
  for (std::size_t g = 0; g < n; ++g) {
    routes[g] = {static_cast<GoalId>(g)};
    route_of[g] = g;
  }

  struct Saving {
    double value;
    GoalId i, j;
  };
  std::vector<Saving> savings;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = distance(depot, goals[i]) + distance(depot, goals[j]) - distance(goals[i], goals[j]);
      if (s > 0.0) savings.push_back({s, static_cast<GoalId>(i), static_cast<GoalId>(j)});
    }
  }
  std::sort(savings.begin(), savings.end(), [](const Saving& a, const Saving& b) {
    return a.value != b.value ? a.value > b.value : std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });

  for (const auto& s : savings) {
    std::size_t ri = route_of[static_cast<std::size_t>(s.i)];
    std::size_t rj = route_of[static_cast<std::size_t>(s.j)];
    if (ri == rj) continue;
    auto& a = routes[ri];
    auto& b = routes[rj];
    if (static_cast<int>(a.size() + b.size()) > capacity) continue;
    bool i_end = a.back() == s.i, i_front = a.front() == s.i;
    bool j_end = b.back() == s.j, j_front = b.front() == s.j;
    if (!(i_end || i_front) || !(j_end || j_front)) continue;
    if (!i_end) std::reverse(a.begin(), a.end());
    if (!j_front) std::reverse(b.begin(), b.end());
    for (GoalId g : b) {
      a.push_back(g);
      route_of[static_cast<std::size_t>(g)] = ri;
    }
    b.clear();
  }

  CvrpSolution out;
  for (auto& r : routes) {
    if (r.empty()) continue;
    std::vector<GoalId> route(r.begin(), r.end());
    detail::two_opt(depot, route, goals);
    out.routes.push_back(std::move(route));
  }
  for (const auto& r : out.routes) out.total_distance += route_length(depot, r, goals);
  return out;
}

inline CvrpSolution cvrp_heuristic(const Scenario& sc) {
  return cvrp_heuristic(sc.source, sc.goals, sc.capacity());
}

/// Executes the CVRP routes. Routes are grouped into at most M sequential
/// schedules by repeatedly merging the two shortest; the longest schedules go
/// to the robots closest to the depot.
inline Plan plan_cvrp(const Scenario& sc) {
  if (sc.robots.empty()) throw Error(Errc::NoRobots, "fleet is empty");
  const auto sol = cvrp_heuristic(sc);
  const double speed = sc.speed();
  auto duration = [&](const std::vector<GoalId>& r) {
    return route_length(sc.source, r, sc.goals) / speed + static_cast<double>(r.size() + 1) * sc.t_service;
  };

  struct Group {
    std::vector<std::size_t> routes;
    double time = 0.0;
  };
  std::vector<Group> groups;
  for (std::size_t k = 0; k < sol.routes.size(); ++k) groups.push_back({{k}, duration(sol.routes[k])});
  while (groups.size() > sc.robots.size()) {
    std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.time < b.time; });
    Group merged = groups[0];
    merged.routes.insert(merged.routes.end(), groups[1].routes.begin(), groups[1].routes.end());
    merged.time += groups[1].time;
    groups.erase(groups.begin(), groups.begin() + 2);
    groups.push_back(std::move(merged));
  }
  std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.time > b.time; });

  std::vector<RobotId> by_depot;
  for (const auto& r : sc.robots) by_depot.push_back(r.id);
  std::stable_sort(by_depot.begin(), by_depot.end(), [&](RobotId a, RobotId b) {
    return distance(sc.robots[static_cast<std::size_t>(a)].position, sc.source) <
           distance(sc.robots[static_cast<std::size_t>(b)].position, sc.source);
  });

  std::vector<TimelineBuilder> builders;
  for (const auto& r : sc.robots) builders.emplace_back(r.id, r.position, r.speed, sc.t_service);
  for (std::size_t k = 0; k < groups.size(); ++k) {
    auto& b = builders[static_cast<std::size_t>(by_depot[k])];
    for (std::size_t ri : groups[k].routes) {
      const auto& route = sol.routes[ri];
      b.travel_to(sc.source);
      b.pickup(static_cast<int>(route.size()));
      for (GoalId g : route) {
        b.travel_to(sc.goals[static_cast<std::size_t>(g)]);
        b.deliver(g);
      }
    }
  }

  Plan plan;
  plan.planner = "cvrp";
  for (auto& b : builders) plan.timelines.push_back(b.take());
  return plan;
}

}  // namespace vcst
