// Plans one small scenario with every planner and prints the fleet metrics.

#include <cstdio>

#include "vcst/vcst.hpp"

int main() {
  using namespace vcst;
  const Scenario sc = generate(preset(Family::MediumBalanced, 7));
  std::printf("%zu goals, %zu robots, C=%d\n", sc.goals.size(), sc.robots.size(), sc.capacity());

  VcstResult r = plan_vcst(sc);
  std::printf("trunk: %zu nodes, %zu relays, cost %.1f s (closure MST %.1f s)\n", r.trunk.nodes().size(),
              r.trunk.relay_count(), r.trunk.total_cost(), r.trunk.closure_mst_cost);

  for (Planner p : {Planner::Vcst, Planner::Hungarian, Planner::Cvrp}) {
    PlannerOutput out = run_planner(p, sc);
    if (!validate_output(out, sc).empty()) {
      std::printf("%s: invalid plan\n", std::string(to_string(p)).c_str());
      return 1;
    }
    PlanMetrics m = compute_metrics_unchecked(out.plan);
    std::printf("%-10s %6.3f km  %5.1f pkg/km  makespan %5.2f min  active %5.2f min\n",
                std::string(to_string(p)).c_str(), m.total_distance_km, m.packages_per_km, m.makespan_min,
                m.active_makespan_min);
  }
}
