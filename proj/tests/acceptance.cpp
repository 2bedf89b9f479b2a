// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "vcst/exact_steiner.hpp"
#include "vcst/experiment.hpp"

using namespace vcst;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s %2d %-28s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RelayCandidate relay_at(Point p) { return {p, 0, 1, 0.0}; }

void fig2_triangle() {
  Stopwatch sw;
  const double h = 10.0 * std::sqrt(3.0) / 2.0;
  const Point s{0, 0};
  const std::vector<Point> goals{{10, 0}, {5, h}};
  const std::vector<RelayCandidate> relay{relay_at({5, h / 3.0})};
  const std::vector<RelayCandidate> none;

  const double mst = build_trunk(build_graph(s, goals, none, 1.0, 0.0)).total_cost();

  // Terminals reach one another only through the centroid relay.
  TransportGraph spokes(make_nodes(s, goals, relay), 1.0, 0.0);
  for (NodeId t = 0; t < 3; ++t) spokes.add_edge(t, 3);
  const auto trunk = route_demands(build_trunk(spokes));
  const double cost = trunk.total_cost();
  const double optimum = exact_steiner(build_graph(s, goals, relay, 1.0, 0.0)).cost;
  const double secs = sw.seconds();

  bool ok = std::abs(mst - 20.0) <= 1e-6 && std::abs(cost - 10.0 * std::sqrt(3.0)) <= 1e-6 &&
            std::abs(optimum - 10.0 * std::sqrt(3.0)) <= 1e-6 && trunk.relay_count() == 1 && secs < 1.0;
  report(1, "fig2_triangle", ok,
         fmt("mst=%.6f trunk=%.6f exact=%.6f reduction=%.1f%% time=%.3fs", mst, cost, optimum,
             100.0 * (1.0 - cost / mst), secs));
}

TransportGraph random_graph(std::mt19937_64& rng, std::size_t n_goals, std::size_t n_relays, double lambda) {
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::bernoulli_distribution keep(0.3);
  std::vector<Point> goals;
  std::vector<RelayCandidate> relays;
  Point source{u(rng), u(rng)};
  for (std::size_t k = 0; k < n_goals; ++k) goals.push_back({u(rng), u(rng)});
  for (std::size_t k = 0; k < n_relays; ++k) relays.push_back(relay_at({u(rng), u(rng)}));
  TransportGraph g(make_nodes(source, goals, relays), 5.0, lambda);
  const auto n = static_cast<NodeId>(g.size());
  for (NodeId w = 1; w < n; ++w) g.add_edge(std::uniform_int_distribution<NodeId>(0, w - 1)(rng), w);
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      if (keep(rng)) g.add_edge(a, b);
    }
  }
  return g;
}

void steiner_ratio() {
  Stopwatch sw;
  std::mt19937_64 rng(2024);
  const int instances = 200;
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const std::size_t goals = 1 + static_cast<std::size_t>(i % 7);  // terminals = goals + 1 <= 8
    const std::size_t relays = std::min<std::size_t>(15 - goals - 1, 2 + static_cast<std::size_t>(i % 6));
    auto g = random_graph(rng, goals, relays, i % 2 ? 5.0 : 0.0);
    auto trunk = route_demands(build_trunk(g));
    const double exact = exact_steiner(g).cost;
    worst = std::max(worst, trunk.total_cost() / exact);
    if (trunk.total_cost() > 2.0 * exact + 1e-9 || !trunk_violations(trunk).empty()) ++bad;
  }
  const double secs = sw.seconds();
  report(2, "steiner_2_approx", bad == 0 && secs < 60.0,
         fmt("instances=%d violations=%d worst_ratio=%.4f time=%.2fs", instances, bad, worst, secs));
}

double brute_force_assignment(const std::vector<std::vector<double>>& c) {
  const std::size_t rows = c.size(), cols = c.front().size();
  const std::size_t k = std::max(rows, cols);
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (perm[i] < cols) s += c[i][perm[i]];
    }
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void hungarian_oracle() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dim(1, 7), cost(0, 1000);
  const int matrices = 300;
  int mismatches = 0;
  for (int i = 0; i < matrices; ++i) {
    const auto r = static_cast<std::size_t>(i < 50 ? 7 : dim(rng));
    const auto c = static_cast<std::size_t>(i < 50 ? 7 : dim(rng));
    std::vector<std::vector<double>> m(r, std::vector<double>(c));
    for (auto& row : m) {
      for (auto& x : row) x = cost(rng);
    }
    if (hungarian_assign(m).total != brute_force_assignment(m)) ++mismatches;
  }
  report(3, "hungarian_oracle", mismatches == 0, fmt("matrices=%d mismatches=%d", matrices, mismatches));
}

struct MakespanTally {
  long plans = 0, bad = 0, no_wait = 0;

  void add(const PlanMetrics& m) {
    ++plans;
    if (m.active_makespan_min > m.makespan_min) ++bad;
    if (m.n_waits == 0) {
      ++no_wait;
      if (m.active_makespan_min != m.makespan_min) ++bad;
    }
  }
};

// Goals downstream of `id`, counted by walking the tree from scratch.
int goals_below(const RelayTrunk& t, NodeId id) {
  int n = t.find(id)->kind == NodeKind::Goal ? 1 : 0;
  for (NodeId c : t.children(id)) n += goals_below(t, c);
  return n;
}

// Goals may sit inside the trunk and forward packages, so a goal absorbs one
// unit net of what it passes on.
std::string trunk_flow_error(const RelayTrunk& t, int& pass_through_goals) {
  if (t.outflow(t.source()) != static_cast<int>(t.goal_count())) return "source outflow";
  for (const auto& n : t.nodes()) {
    if (n.kind == NodeKind::Goal && t.inflow(n.id) - t.outflow(n.id) != 1) return "goal demand";
    if (n.kind == NodeKind::Goal && t.outflow(n.id) > 0) ++pass_through_goals;
    if (n.kind == NodeKind::Relay && t.inflow(n.id) != t.outflow(n.id)) return "relay conservation";
  }
  for (const auto& e : t.edges()) {
    if (e.flow < 1 || e.flow != goals_below(t, e.to)) return "edge flow";
  }
  return {};
}

void feasibility_fuzz(MakespanTally& tally) {
  Stopwatch sw;
  const int scenarios = 1000;
  int bad_plans = 0, bad_trunks = 0, trunks = 0, pass_through = 0;
  std::string first;
  for (int i = 0; i < scenarios; ++i) {
    const Family f = kBenchmarkFamilies[static_cast<std::size_t>(i) % kBenchmarkFamilies.size()];
    const Scenario sc = generate(preset(f, 100000 + static_cast<std::uint64_t>(i)));
    for (Planner p : {Planner::Vcst, Planner::Hungarian, Planner::Cvrp}) {
      auto out = run_planner(p, sc);
      auto v = validate_output(out, sc);
      if (!v.empty()) {
        ++bad_plans;
        if (first.empty()) first = fmt(" first=%s/%s/%s", std::string(to_string(f)).c_str(),
                                       std::string(to_string(p)).c_str(), std::string(to_string(v[0].kind)).c_str());
        continue;
      }
      tally.add(compute_metrics_unchecked(out.plan));
      if (out.vcst) {
        ++trunks;
        if (!trunk_flow_error(out.vcst->trunk, pass_through).empty() || !trunk_violations(out.vcst->trunk).empty()) ++bad_trunks;
      }
    }
  }
  report(4, "plan_feasibility_fuzz", bad_plans == 0,
         fmt("scenarios=%d plans=%d invalid=%d time=%.1fs%s", scenarios, 3 * scenarios, bad_plans, sw.seconds(),
             first.c_str()));
  report(5, "flow_conservation", bad_trunks == 0 && trunks == scenarios,
         fmt("trunks=%d violations=%d goals_forwarding=%d", trunks, bad_trunks, pass_through));
}

const PairedComparison* find(const Summary& s, Family f, Planner base) {
  for (const auto& c : s.comparisons) {
    if (c.family == f && c.baseline == base) return &c;
  }
  return nullptr;
}

double mean_distance(const Summary& s, Family f, Planner p) {
  for (const auto& x : s.planners) {
    if (x.family == f && x.planner == p) return x.distance_km.mean;
  }
  return std::nan("");
}

void table_direction(MakespanTally& tally) {
  Stopwatch sw;
  ExperimentConfig cfg;
  cfg.families = {Family::MediumBalanced, Family::LargeDistribution, Family::LowCapacity};
  cfg.planners = {Planner::Vcst, Planner::Hungarian};
  cfg.trials = 100;
  auto res = run_experiment(cfg);
  const double secs = sw.seconds();
  for (const auto& r : res.rows) tally.add(r.metrics);
  auto s = summarize(res.rows);

  bool ok = res.failures.empty() && secs < 600.0;
  std::string detail;
  for (Family f : cfg.families) {
    const auto* c = find(s, f, Planner::Hungarian);
    if (c == nullptr) {
      ok = false;
      continue;
    }
    const double v = mean_distance(s, f, Planner::Vcst), h = mean_distance(s, f, Planner::Hungarian);
    ok = ok && v < h && c->distance_p < 1e-3;
    if (f == Family::LargeDistribution) ok = ok && c->mean_distance_saving >= 0.15;
    detail += fmt("%s: %.2f vs %.2f km saving=%.1f%% p=%.2e; ", std::string(to_string(f)).c_str(), v, h,
                  100.0 * c->mean_distance_saving, c->distance_p);
  }
  report(6, "distance_vs_hungarian", ok, detail + fmt("time=%.1fs", secs));

  const auto* low = find(s, Family::LowCapacity, Planner::Hungarian);
  double ev = 0.0, eh = 0.0;
  for (const auto& x : s.planners) {
    if (x.family != Family::LowCapacity) continue;
    (x.planner == Planner::Vcst ? ev : eh) = x.pkgs_per_km.mean;
  }
  const bool capacity_ok = generate(preset(Family::LowCapacity)).capacity() == 2;
  report(7, "low_capacity_efficiency", low != nullptr && capacity_ok && ev > eh && low->efficiency_p < 1e-3,
         fmt("C=2 pkgs/km vcst=%.2f hungarian=%.2f wins=%d losses=%d p=%.2e", ev, eh, low ? low->efficiency_wins : 0,
             low ? low->efficiency_losses : 0, low ? low->efficiency_p : 1.0));
}

void determinism() {
  ExperimentConfig cfg;
  cfg.families.assign(kBenchmarkFamilies.begin(), kBenchmarkFamilies.end());
  cfg.trials = 5;
  cfg.seed_base = 777;
  auto csv = [&] {
    std::ostringstream os;
    write_rows_csv(os, run_experiment(cfg).rows);
    return os.str();
  };
  const auto a = csv(), b = csv();
  report(9, "deterministic_csv", a == b && !a.empty(),
         fmt("rows=%ld bytes=%zu identical=%s", static_cast<long>(std::count(a.begin(), a.end(), '\n')) - 1, a.size(),
             a == b ? "yes" : "no"));
}

void batch_law() {
  std::mt19937_64 rng(500);
  std::uniform_int_distribution<int> n_dist(1, 40), c_dist(1, 8);
  const int pairs = 500;
  int bad = 0;
  for (int i = 0; i < pairs; ++i) {
    ScenarioSpec spec;
    spec.sides = {200.0};
    const int n = n_dist(rng), c = c_dist(rng);
    spec.goals = {n, n};
    spec.robots = {1, 1};
    spec.capacity = c;
    spec.seed = static_cast<std::uint64_t>(i);
    const Scenario sc = generate(spec);
    const auto res = plan_vcst(sc);
    long pickups = 0;
    for (const auto& tl : res.plan.timelines) {
      pickups += std::count_if(tl.actions.begin(), tl.actions.end(),
                               [](const Action& a) { return a.kind == ActionKind::Pickup; });
    }
    const long want = (n + c - 1) / c;
    if (pickups != want || static_cast<long>(res.batches.size()) != want || !validate(res.plan, sc).empty()) ++bad;
  }
  report(10, "batch_count_law", bad == 0, fmt("pairs=%d mismatches=%d", pairs, bad));
}

}  // namespace

int main() {
  MakespanTally tally;
  try {
    fig2_triangle();
    steiner_ratio();
    hungarian_oracle();
    feasibility_fuzz(tally);
    table_direction(tally);
    report(8, "makespan_decomposition", tally.bad == 0 && tally.plans > 0,
           fmt("plans=%ld without_waits=%ld violations=%ld", tally.plans, tally.no_wait, tally.bad));
    determinism();
    batch_law();
  } catch (const std::exception& e) {
    std::printf("FAIL    acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
