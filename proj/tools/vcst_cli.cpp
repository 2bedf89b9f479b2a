// Experiment harness: `run` sweeps planners over scenario families, `dump`
// writes the artifacts of a single trial.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vcst/vcst.hpp"

namespace fs = std::filesystem;
using namespace vcst;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidPlan = 1;
constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(tok);
    }
  }
  return out;
}

std::vector<Family> parse_families(const std::vector<std::string>& raw) {
  std::vector<Family> out;
  for (const auto& name : split_list(raw)) {
    if (name == "all") {
      out.insert(out.end(), kBenchmarkFamilies.begin(), kBenchmarkFamilies.end());
      continue;
    }
    auto f = parse_family(name);
    if (!f) throw ConfigError("unknown family '" + name + "'");
    out.push_back(*f);
  }
  if (out.empty()) throw ConfigError("no families selected");
  std::vector<Family> unique;
  for (Family f : out) {
    if (std::find(unique.begin(), unique.end(), f) == unique.end()) unique.push_back(f);
  }
  return unique;
}

std::vector<Planner> parse_planners(const std::vector<std::string>& raw) {
  std::vector<Planner> out;
  for (const auto& name : split_list(raw)) {
    auto p = parse_planner(name);
    if (!p) throw ConfigError("unknown planner '" + name + "'");
    if (std::find(out.begin(), out.end(), *p) == out.end()) out.push_back(*p);
  }
  if (out.empty()) throw ConfigError("no planners selected");
  return out;
}

std::string timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void print_violations(std::ostream& os, const std::string& where, const std::vector<Violation>& vs) {
  for (const auto& v : vs) {
    os << where << ": " << to_string(v.kind);
    if (v.robot >= 0) os << " robot=" << v.robot;
    if (v.action >= 0) os << " action=" << v.action;
    os << " " << v.detail << "\n";
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  f << j.dump(2) << "\n";
}

struct RunArgs {
  std::vector<std::string> families{"all"};
  std::vector<std::string> planners{"vcst,hungarian,cvrp"};
  int trials = 100;
  std::uint64_t seed = 0;
  std::optional<int> capacity;
  std::optional<double> lambda_svc;
  std::string out = "results";
  bool dump_trunk = false;
  bool dump_plan = false;
};

int cmd_run(const RunArgs& a) {
  ExperimentConfig cfg;
  cfg.families = parse_families(a.families);
  cfg.planners = parse_planners(a.planners);
  if (a.trials < 1) throw ConfigError("--trials must be at least 1");
  if (a.capacity && *a.capacity < 1) throw ConfigError("--capacity must be at least 1");
  if (a.lambda_svc && !(*a.lambda_svc >= 0.0)) throw ConfigError("--lambda-svc must be non-negative");
  cfg.trials = a.trials;
  cfg.seed_base = a.seed;
  cfg.capacity = a.capacity;
  cfg.vcst.service_weight = a.lambda_svc;

  const fs::path out(a.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(Errc::Io, "cannot create " + out.string() + ": " + ec.message());
  if (a.dump_trunk) fs::create_directories(out / "trunks");
  if (a.dump_plan) fs::create_directories(out / "plans");

  const bool has_vcst = std::find(cfg.planners.begin(), cfg.planners.end(), Planner::Vcst) != cfg.planners.end();
  auto observer = [&](const Scenario& sc, Planner p, const PlannerOutput& o, const std::vector<Violation>& vs) {
    const std::string stem = std::string(to_string(sc.family)) + "_seed" + std::to_string(sc.seed);
    if (!vs.empty()) print_violations(std::cerr, stem + " " + std::string(to_string(p)), vs);
    if (a.dump_trunk) {
      if (p == Planner::Vcst) {
        write_json(out / "trunks" / (stem + ".json"), o.vcst->trunk);
      } else if (!has_vcst && p == cfg.planners.front()) {
        write_json(out / "trunks" / (stem + ".json"), plan_vcst(sc, cfg.vcst).trunk);
      }
    }
    if (a.dump_plan) {
      write_json(out / "plans" / (stem + "_" + std::string(to_string(p)) + ".json"), o.plan);
    }
  };

  ExperimentResult res = run_experiment(cfg, observer);

  {
    std::ofstream f(out / "trials.csv");
    if (!f) throw Error(Errc::Io, "cannot write " + (out / "trials.csv").string());
    f << "# generated " << timestamp() << "\n";
    write_rows_csv(f, res.rows);
  }
  Summary summary = summarize(res.rows);
  {
    std::ofstream f(out / "summary.csv");
    if (!f) throw Error(Errc::Io, "cannot write " + (out / "summary.csv").string());
    write_summary_csv(f, summary);
  }
  print_summary_table(std::cout, summary);
  std::cout << "rows: " << res.rows.size() << "  invalid plans: " << res.failures.size() << "  output: " << out.string()
            << "\n";
  return res.failures.empty() ? kExitOk : kExitInvalidPlan;
}

struct DumpArgs {
  std::string family = "small_dense";
  std::uint64_t seed = 0;
  std::string planner = "vcst";
  std::optional<int> capacity;
  std::optional<double> lambda_svc;
  std::string scenario_file;
  std::string out = "dump";
};

int cmd_dump(const DumpArgs& a) {
  Scenario sc;
  if (!a.scenario_file.empty()) {
    std::ifstream f(a.scenario_file);
    if (!f) throw ConfigError("cannot read " + a.scenario_file);
    try {
      sc = nlohmann::json::parse(f).get<Scenario>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(a.scenario_file + ": " + e.what());
    }
  } else {
    auto f = parse_family(a.family);
    if (!f) throw ConfigError("unknown family '" + a.family + "'");
    ScenarioSpec spec = preset(*f, a.seed);
    if (a.capacity) spec.capacity = *a.capacity;
    sc = generate(spec);
  }
  auto p = parse_planner(a.planner);
  if (!p) throw ConfigError("unknown planner '" + a.planner + "'");
  VcstOptions opts;
  opts.service_weight = a.lambda_svc;

  auto violations = validate_output(run_planner(*p, sc, opts), sc);
  DumpPaths paths = dump_artifacts(sc, *p, a.out, opts);
  for (const auto& path : {paths.scenario, paths.trunk, paths.plan, paths.svg}) std::cout << path.string() << "\n";
  if (!violations.empty()) {
    print_violations(std::cerr, std::string(to_string(*p)), violations);
    return kExitInvalidPlan;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relay-trunk delivery planner and benchmark harness"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run planners over scenario families with paired seeds");
  run_cmd->add_option("--family", run.families, "Families (comma separated, or 'all')");
  run_cmd->add_option("--planners", run.planners, "Planners: vcst, hungarian, cvrp, hungarian_batched");
  run_cmd->add_option("--trials", run.trials, "Trials per family");
  run_cmd->add_option("--seed", run.seed, "Seed of trial 0; trial i uses seed + i");
  run_cmd->add_option("--capacity", run.capacity, "Override robot capacity C");
  run_cmd->add_option("--lambda-svc", run.lambda_svc, "Service weight in the edge cost [s] (default: T_s)");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_flag("--dump-trunk", run.dump_trunk, "Write the relay trunk of every trial");
  run_cmd->add_flag("--dump-plan", run.dump_plan, "Write every plan");

  DumpArgs dump;
  auto* dump_cmd = app.add_subcommand("dump", "Write scenario, trunk, plan and SVG overlay for one trial");
  dump_cmd->add_option("--family", dump.family, "Scenario family");
  dump_cmd->add_option("--seed", dump.seed, "Scenario seed");
  dump_cmd->add_option("--planner", dump.planner, "Planner whose tours are drawn");
  dump_cmd->add_option("--capacity", dump.capacity, "Override robot capacity C");
  dump_cmd->add_option("--lambda-svc", dump.lambda_svc, "Service weight in the edge cost [s]");
  dump_cmd->add_option("--scenario", dump.scenario_file, "Scenario JSON instead of a generated one");
  dump_cmd->add_option("--out", dump.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    return cmd_dump(dump);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
