#pragma once

// Paired-seed experiment harness: runs planners over scenario families,
// validates every plan, and reports per-trial rows plus summary statistics.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <tuple>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vcst/baselines.hpp"
#include "vcst/coordination.hpp"
#include "vcst/scenario.hpp"
#include "vcst/simulation.hpp"

namespace vcst {

enum class Planner { Vcst, Hungarian, Cvrp, HungarianBatched };

inline std::string_view to_string(Planner p) {
  switch (p) {
    case Planner::Vcst: return "vcst";
    case Planner::Hungarian: return "hungarian";
    case Planner::Cvrp: return "cvrp";
    case Planner::HungarianBatched: return "hungarian_batched";
  }
  return "unknown";
}

inline std::optional<Planner> parse_planner(std::string_view s) {
  for (auto p : {Planner::Vcst, Planner::Hungarian, Planner::Cvrp, Planner::HungarianBatched}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

struct PlannerOutput {
  Plan plan;
  std::optional<VcstResult> vcst;
  std::optional<RelayThroughput> throughput;  // trunk inflow per relay id
};

inline RelayThroughput relay_throughput(const RelayTrunk& trunk) {
  RelayThroughput out;
  for (const auto& n : trunk.nodes()) {
    if (n.kind == NodeKind::Relay) out[n.ref] = trunk.inflow(n.id);
  }
  return out;
}

inline PlannerOutput run_planner(Planner planner, const Scenario& sc, const VcstOptions& opts = {}) {
  PlannerOutput out;
  switch (planner) {
    case Planner::Vcst: {
      out.vcst = plan_vcst(sc, opts);
      out.plan = out.vcst->plan;
      out.throughput = relay_throughput(out.vcst->trunk);
      break;
    }
    case Planner::Hungarian: out.plan = plan_hungarian(sc); break;
    case Planner::Cvrp: out.plan = plan_cvrp(sc); break;
    case Planner::HungarianBatched: out.plan = plan_hungarian(sc, HungarianRounds::FillCapacity); break;
  }
  return out;
}

inline std::vector<Violation> validate_output(const PlannerOutput& out, const Scenario& sc) {
  return validate(out.plan, sc, out.throughput ? &*out.throughput : nullptr);
}

struct ExperimentConfig {
  std::vector<Family> families;
  std::vector<Planner> planners{Planner::Vcst, Planner::Hungarian, Planner::Cvrp};
  int trials = 100;
  std::uint64_t seed_base = 0;
  std::optional<int> capacity;
  VcstOptions vcst;
};

inline ScenarioSpec trial_spec(const ExperimentConfig& cfg, Family family, int trial) {
  ScenarioSpec spec = preset(family, cfg.seed_base + static_cast<std::uint64_t>(trial));
  if (cfg.capacity) spec.capacity = *cfg.capacity;
  return spec;
}

struct TrialRow {
  Family family;
  Planner planner;
  std::uint64_t seed;
  PlanMetrics metrics;
};

struct TrialFailure {
  Family family;
  Planner planner;
  std::uint64_t seed;
  std::vector<Violation> violations;
};

struct ExperimentResult {
  std::vector<TrialRow> rows;  // sorted by (family, planner, seed)
  std::vector<TrialFailure> failures;
};

using TrialObserver =
    std::function<void(const Scenario&, Planner, const PlannerOutput&, const std::vector<Violation>&)>;

/// Every planner sees the same scenario for a given (family, trial).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const TrialObserver& observer = {}) {
  if (cfg.trials < 1) throw Error(Errc::InvalidArgument, "trials must be at least 1");
  if (cfg.planners.empty()) throw Error(Errc::InvalidArgument, "no planners selected");
  if (cfg.families.empty()) throw Error(Errc::InvalidArgument, "no families selected");
  ExperimentResult res;
  for (Family f : cfg.families) {
    for (int i = 0; i < cfg.trials; ++i) {
      const Scenario sc = generate(trial_spec(cfg, f, i));
      for (Planner p : cfg.planners) {
        PlannerOutput out = run_planner(p, sc, cfg.vcst);
        auto violations = validate_output(out, sc);
        if (observer) observer(sc, p, out, violations);
        if (!violations.empty()) {
          res.failures.push_back({f, p, sc.seed, violations});
          continue;
        }
        res.rows.push_back({f, p, sc.seed, compute_metrics_unchecked(out.plan)});
      }
    }
  }
  std::stable_sort(res.rows.begin(), res.rows.end(), [](const TrialRow& a, const TrialRow& b) {
    return std::tie(a.family, a.planner, a.seed) < std::tie(b.family, b.planner, b.seed);
  });
  return res;
}

inline std::string format_fixed(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

inline std::string format_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline constexpr const char* kCsvHeader =
    "family,planner,seed,distance_km,pkgs_per_km,makespan_min,active_makespan_min,n_relays_used,n_waits,wait_time_s";

inline void write_rows_csv(std::ostream& os, const std::vector<TrialRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    os << to_string(r.family) << ',' << to_string(r.planner) << ',' << r.seed << ',' << format_fixed(m.total_distance_km)
       << ',' << format_fixed(m.packages_per_km) << ',' << format_fixed(m.makespan_min) << ','
       << format_fixed(m.active_makespan_min) << ',' << m.n_relays_used << ',' << m.n_waits << ','
       << format_fixed(m.wait_time_s) << '\n';
  }
}

/// Two-sided exact sign test; ties are discarded by the caller.
inline double sign_test_p(int wins, int losses) {
  const int n = wins + losses;
  if (n == 0) return 1.0;
  const int k = std::min(wins, losses);
  // Sum binomial(n, i) / 2^n for i <= k in log space.
  double acc = 0.0;
  const double log_half_n = -n * std::log(2.0);
  for (int i = 0; i <= k; ++i) {
    double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) + log_half_n;
    acc += std::exp(log_term);
  }
  return std::min(1.0, 2.0 * acc);
}

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::size_t n = 0;
};

inline Stat describe(const std::vector<double>& xs) {
  Stat s;
  s.n = xs.size();
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

struct PlannerSummary {
  Family family;
  Planner planner;
  Stat distance_km, pkgs_per_km, makespan_min, active_makespan_min;
};

/// VCST against one baseline on paired trials.
struct PairedComparison {
  Family family;
  Planner baseline;
  int distance_wins = 0, distance_losses = 0;      // VCST shorter / longer
  int efficiency_wins = 0, efficiency_losses = 0;  // VCST more / fewer packages per km
  double distance_p = 1.0;
  double efficiency_p = 1.0;
  double mean_distance_saving = 0.0;  // 1 - mean(vcst) / mean(baseline)
};

struct Summary {
  std::vector<PlannerSummary> planners;
  std::vector<PairedComparison> comparisons;
};

inline Summary summarize(const std::vector<TrialRow>& rows) {
  std::map<std::pair<Family, Planner>, std::map<std::uint64_t, PlanMetrics>> by;
  for (const auto& r : rows) by[{r.family, r.planner}][r.seed] = r.metrics;

  Summary s;
  for (const auto& [key, trials] : by) {
    std::vector<double> d, e, mk, am;
    for (const auto& [_, m] : trials) {
      d.push_back(m.total_distance_km);
      e.push_back(m.packages_per_km);
      mk.push_back(m.makespan_min);
      am.push_back(m.active_makespan_min);
    }
    s.planners.push_back({key.first, key.second, describe(d), describe(e), describe(mk), describe(am)});
  }
  for (const auto& [key, vtrials] : by) {
    if (key.second != Planner::Vcst) continue;
    for (Planner base : {Planner::Hungarian, Planner::Cvrp, Planner::HungarianBatched}) {
      auto it = by.find({key.first, base});
      if (it == by.end()) continue;
      PairedComparison c{key.first, base};
      double sum_v = 0.0, sum_b = 0.0;
      for (const auto& [seed, mv] : vtrials) {
        auto jt = it->second.find(seed);
        if (jt == it->second.end()) continue;
        const auto& mb = jt->second;
        sum_v += mv.total_distance_km;
        sum_b += mb.total_distance_km;
        if (mv.total_distance_km < mb.total_distance_km) ++c.distance_wins;
        if (mv.total_distance_km > mb.total_distance_km) ++c.distance_losses;
        if (mv.packages_per_km > mb.packages_per_km) ++c.efficiency_wins;
        if (mv.packages_per_km < mb.packages_per_km) ++c.efficiency_losses;
      }
      c.distance_p = sign_test_p(c.distance_wins, c.distance_losses);
      c.efficiency_p = sign_test_p(c.efficiency_wins, c.efficiency_losses);
      c.mean_distance_saving = sum_b > 0.0 ? 1.0 - sum_v / sum_b : 0.0;
      s.comparisons.push_back(c);
    }
  }
  return s;
}

inline void write_summary_csv(std::ostream& os, const Summary& s) {
  os << "family,planner,trials,distance_km_mean,distance_km_std,pkgs_per_km_mean,pkgs_per_km_std,"
        "makespan_min_mean,makespan_min_std,active_makespan_min_mean,active_makespan_min_std\n";
  for (const auto& p : s.planners) {
    os << to_string(p.family) << ',' << to_string(p.planner) << ',' << p.distance_km.n << ','
       << format_fixed(p.distance_km.mean) << ',' << format_fixed(p.distance_km.stddev) << ','
       << format_fixed(p.pkgs_per_km.mean) << ',' << format_fixed(p.pkgs_per_km.stddev) << ','
       << format_fixed(p.makespan_min.mean) << ',' << format_fixed(p.makespan_min.stddev) << ','
       << format_fixed(p.active_makespan_min.mean) << ',' << format_fixed(p.active_makespan_min.stddev) << '\n';
  }
  os << "\nfamily,baseline,distance_wins,distance_losses,distance_sign_p,mean_distance_saving,"
        "efficiency_wins,efficiency_losses,efficiency_sign_p\n";
  for (const auto& c : s.comparisons) {
    os << to_string(c.family) << ',' << to_string(c.baseline) << ',' << c.distance_wins << ',' << c.distance_losses
       << ',' << format_sci(c.distance_p) << ',' << format_fixed(c.mean_distance_saving, 4) << ','
       << c.efficiency_wins << ',' << c.efficiency_losses << ',' << format_sci(c.efficiency_p) << '\n';
  }
}

/// Human-readable table with the same columns as the published comparison.
inline void print_summary_table(std::ostream& os, const Summary& s) {
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %-17s %16s %16s %16s %16s\n", "Scenario", "Method", "Distance [km]",
                "Packages/km", "Makespan [min]", "Active [min]");
  os << line;
  for (const auto& p : s.planners) {
    std::snprintf(line, sizeof line, "%-20s %-17s %8.2f ± %5.2f %8.1f ± %5.1f %8.2f ± %5.2f %8.2f ± %5.2f\n",
                  std::string(to_string(p.family)).c_str(), std::string(to_string(p.planner)).c_str(),
                  p.distance_km.mean, p.distance_km.stddev, p.pkgs_per_km.mean, p.pkgs_per_km.stddev,
                  p.makespan_min.mean, p.makespan_min.stddev, p.active_makespan_min.mean,
                  p.active_makespan_min.stddev);
    os << line;
  }
  for (const auto& c : s.comparisons) {
    std::snprintf(line, sizeof line, "%-20s vcst vs %-17s distance saving %6.1f%%  sign p=%.3e  (pkgs/km p=%.3e)\n",
                  std::string(to_string(c.family)).c_str(), std::string(to_string(c.baseline)).c_str(),
                  100.0 * c.mean_distance_saving, c.distance_p, c.efficiency_p);
    os << line;
  }
}

/// SVG overlay of the Voronoi cells, relay trunk and the plan's travel legs.
/// The drawing uses workspace coordinates with y pointing up.
inline void write_svg(std::ostream& os, const Scenario& sc, const VcstResult& structure, const Plan& plan) {
  const double w = sc.workspace.width();
  const double h = sc.workspace.height();
  const double stroke = std::max(w, h) / 400.0;
  auto num = [](double v) { return format_fixed(v, 3); };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n";
  os << "<g transform=\"translate(" << num(-sc.workspace.min_corner.x) << ',' << num(h + sc.workspace.min_corner.y)
     << ") scale(1,-1)\">\n";
  os << "<rect x=\"" << num(sc.workspace.min_corner.x) << "\" y=\"" << num(sc.workspace.min_corner.y) << "\" width=\""
     << num(w) << "\" height=\"" << num(h) << "\" fill=\"white\" stroke=\"black\" stroke-width=\"" << num(stroke)
     << "\"/>\n";
  for (const auto& c : structure.cells) {
    os << "<polygon class=\"cell\" fill=\"none\" stroke=\"#999\" stroke-width=\"" << num(stroke) << "\" points=\"";
    for (const auto& p : c.polygon) os << num(p.x) << ',' << num(p.y) << ' ';
    os << "\"/>\n";
  }
  for (const auto& e : structure.trunk.edges()) {
    Point a = structure.trunk.find(e.from)->position;
    Point b = structure.trunk.find(e.to)->position;
    os << "<line class=\"trunk\" x1=\"" << num(a.x) << "\" y1=\"" << num(a.y) << "\" x2=\"" << num(b.x) << "\" y2=\""
       << num(b.y) << "\" stroke=\"#1f6fd1\" stroke-width=\"" << num(stroke * (1.0 + e.flow * 0.5)) << "\"/>\n";
  }
  static const char* palette[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  for (const auto& tl : plan.timelines) {
    const char* color = palette[static_cast<std::size_t>(tl.robot) % std::size(palette)];
    for (const auto& a : tl.actions) {
      if (a.kind != ActionKind::Travel) continue;
      os << "<line class=\"tour\" x1=\"" << num(a.from.x) << "\" y1=\"" << num(a.from.y) << "\" x2=\"" << num(a.to.x)
         << "\" y2=\"" << num(a.to.y) << "\" stroke=\"" << color << "\" stroke-dasharray=\"" << num(stroke * 4)
         << "\" stroke-width=\"" << num(stroke) << "\"/>\n";
    }
  }
  for (const auto& r : structure.relays) {
    os << "<circle class=\"relay\" cx=\"" << num(r.position.x) << "\" cy=\"" << num(r.position.y) << "\" r=\""
       << num(stroke * 3) << "\" fill=\"orange\"/>\n";
  }
  for (const auto& g : sc.goals) {
    os << "<circle class=\"goal\" cx=\"" << num(g.x) << "\" cy=\"" << num(g.y) << "\" r=\"" << num(stroke * 3)
       << "\" fill=\"green\"/>\n";
  }
  for (const auto& r : sc.robots) {
    os << "<rect class=\"robot\" x=\"" << num(r.position.x - stroke * 3) << "\" y=\"" << num(r.position.y - stroke * 3)
       << "\" width=\"" << num(stroke * 6) << "\" height=\"" << num(stroke * 6) << "\" fill=\"black\"/>\n";
  }
  os << "<circle class=\"source\" cx=\"" << num(sc.source.x) << "\" cy=\"" << num(sc.source.y) << "\" r=\""
     << num(stroke * 5) << "\" fill=\"blue\"/>\n";
  os << "</g>\n</svg>\n";
}

struct DumpPaths {
  std::filesystem::path scenario, trunk, plan, svg;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error(Errc::Io, "failed writing " + path.string());
}

}  // namespace detail

/// Writes scenario, trunk, plan and SVG overlay for one trial. The trunk and
/// cells are scenario-level structures and are written for every planner.
inline DumpPaths dump_artifacts(const Scenario& sc, Planner planner, const std::filesystem::path& dir,
                                const VcstOptions& opts = {}, const std::string& prefix = "") {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());

  PlannerOutput out = run_planner(planner, sc, opts);
  const VcstResult structure = out.vcst ? *out.vcst : plan_vcst(sc, opts);

  DumpPaths p{dir / (prefix + "scenario.json"), dir / (prefix + "trunk.json"), dir / (prefix + "plan.json"),
              dir / (prefix + "overlay.svg")};
  detail::write_file(p.scenario, nlohmann::json(sc).dump(2) + "\n");
  detail::write_file(p.trunk, nlohmann::json(structure.trunk).dump(2) + "\n");
  detail::write_file(p.plan, nlohmann::json(out.plan).dump(2) + "\n");
  std::ostringstream svg;
  write_svg(svg, sc, structure, out.plan);
  detail::write_file(p.svg, svg.str());
  return p;
}

}  // namespace vcst
