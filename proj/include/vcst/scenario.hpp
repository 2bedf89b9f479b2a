#pragma once

// Scenario model and the seeded generator for the benchmark families.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vcst/core.hpp"

namespace vcst {

enum class Family {
  SmallDense,
  SmallSparse,
  MediumBalanced,
  LargeDistribution,
  LargeWarehouse,
  HighCapacity,
  LowCapacity,
  Custom,
};

inline constexpr std::array<Family, 7> kBenchmarkFamilies{
    Family::SmallDense,        Family::SmallSparse,    Family::MediumBalanced, Family::LargeDistribution,
    Family::LargeWarehouse,    Family::HighCapacity,   Family::LowCapacity,
};

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::SmallDense: return "small_dense";
    case Family::SmallSparse: return "small_sparse";
    case Family::MediumBalanced: return "medium_balanced";
    case Family::LargeDistribution: return "large_distribution";
    case Family::LargeWarehouse: return "large_warehouse";
    case Family::HighCapacity: return "high_capacity";
    case Family::LowCapacity: return "low_capacity";
    case Family::Custom: return "custom";
  }
  return "custom";
}

inline std::optional<Family> parse_family(std::string_view s) {
  for (Family f : kBenchmarkFamilies) {
    if (to_string(f) == s) return f;
  }
  if (s == "custom") return Family::Custom;
  return std::nullopt;
}

struct IntRange {
  int lo = 0;
  int hi = 0;  // inclusive
};

/// Generator parameters. Ranged fields are resolved from the seed.
struct ScenarioSpec {
  Family family = Family::Custom;
  std::vector<double> sides{100.0};  // square workspace side, one drawn per scenario
  IntRange goals{8, 8};
  IntRange robots{3, 3};
  int capacity = 4;
  double speed = 5.0;      // m/s
  double t_service = 5.0;  // s
  bool source_center = false;
  std::uint64_t seed = 0;
};

inline constexpr int kDefaultCapacity = 4;

/// Family presets. Capacity for the non-stress families is not fixed by the
/// benchmark description and defaults to kDefaultCapacity.
inline ScenarioSpec preset(Family f, std::uint64_t seed = 0) {
  ScenarioSpec s;
  s.family = f;
  s.seed = seed;
  s.capacity = kDefaultCapacity;
  switch (f) {
    case Family::SmallDense:
      s.sides = {100.0};
      s.goals = {8, 8};
      s.robots = {3, 3};
      break;
    case Family::SmallSparse:
      s.sides = {150.0};
      s.goals = {8, 8};
      s.robots = {3, 3};
      break;
    case Family::MediumBalanced:
      s.sides = {200.0};
      s.goals = {15, 15};
      s.robots = {4, 5};
      break;
    case Family::LargeDistribution:
      s.sides = {300.0, 400.0};
      s.goals = {25, 30};
      s.robots = {8, 10};
      break;
    case Family::LargeWarehouse:
      s.sides = {300.0, 400.0};
      s.goals = {25, 30};
      s.robots = {8, 10};
      s.source_center = true;
      break;
    case Family::HighCapacity:
      s.sides = {200.0};
      s.goals = {15, 15};
      s.robots = {4, 5};
      s.capacity = 6;
      break;
    case Family::LowCapacity:
      s.sides = {200.0};
      s.goals = {15, 15};
      s.robots = {4, 5};
      s.capacity = 2;
      break;
    case Family::Custom:
      break;
  }
  return s;
}

struct Robot {
  RobotId id = 0;
  Point position;
  int capacity = 1;
  double speed = 5.0;
};

struct Scenario {
  Family family = Family::Custom;
  Workspace workspace = Workspace::box(100.0, 100.0);
  Point source;
  std::vector<Point> goals;
  std::vector<Robot> robots;
  double t_service = 5.0;
  std::uint64_t seed = 0;

  std::size_t goal_count() const { return goals.size(); }
  int capacity() const { return robots.empty() ? 0 : robots.front().capacity; }
  double speed() const { return robots.empty() ? 0.0 : robots.front().speed; }
  std::vector<Point> robot_positions() const {
    std::vector<Point> out;
    for (const auto& r : robots) out.push_back(r.position);
    return out;
  }
};

/// Seeded stream built on std::mt19937_64, whose output sequence is fixed by
/// the C++ standard. Real and integer mappings are defined here rather than
/// through std:: distributions, which are implementation-specific.
class ScenarioRng {
 public:
  explicit ScenarioRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in the open interval (0, 1).
  double unit() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi].
  int between(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline constexpr double kMinSeparation = 1.0;
inline constexpr int kPlacementAttempts = 100000;

inline Scenario generate(const ScenarioSpec& spec) {
  if (spec.sides.empty() || spec.goals.lo < 1 || spec.goals.hi < spec.goals.lo || spec.robots.lo < 1 ||
      spec.robots.hi < spec.robots.lo || spec.speed <= 0.0 || spec.t_service < 0.0) {
    throw Error(Errc::InvalidArgument, "invalid scenario parameters");
  }
  if (spec.capacity < 1) throw Error(Errc::ZeroCapacity, "robot capacity must be at least 1");
  for (double s : spec.sides) {
    if (!(s > 0.0)) throw Error(Errc::InvalidArgument, "workspace side must be positive");
  }

  ScenarioRng rng(spec.seed);
  Scenario sc;
  sc.family = spec.family;
  sc.seed = spec.seed;
  sc.t_service = spec.t_service;
  const double side = spec.sides[static_cast<std::size_t>(rng.between(0, static_cast<int>(spec.sides.size()) - 1))];
  const int n_goals = rng.between(spec.goals.lo, spec.goals.hi);
  const int n_robots = rng.between(spec.robots.lo, spec.robots.hi);
  sc.workspace = Workspace::box(side, side);

  const auto total = static_cast<double>(1 + n_goals + n_robots);
  // Random sequential placement of 1 m disks jams well below this density.
  if (total * 0.25 * 3.14159265358979 > 0.5 * side * side) {
    throw Error(Errc::SeparationInfeasible, "workspace too small for the requested point count");
  }

  std::vector<Point> placed;
  auto draw = [&]() {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      Point p{side * rng.unit(), side * rng.unit()};
      bool ok = true;
      for (const auto& q : placed) {
        if (distance(p, q) < kMinSeparation) {
          ok = false;
          break;
        }
      }
      if (ok) {
        placed.push_back(p);
        return p;
      }
    }
    throw Error(Errc::SeparationInfeasible, "could not place point with 1 m separation");
  };

  if (spec.source_center) {
    sc.source = {side / 2.0, side / 2.0};
    placed.push_back(sc.source);
  } else {
    sc.source = draw();
  }
  for (int g = 0; g < n_goals; ++g) sc.goals.push_back(draw());
  for (int r = 0; r < n_robots; ++r) sc.robots.push_back({r, draw(), spec.capacity, spec.speed});
  return sc;
}

inline void to_json(nlohmann::json& j, const Scenario& s) {
  j = nlohmann::json::object();
  j["family"] = std::string(to_string(s.family));
  j["workspace"] = {{"w", s.workspace.width()}, {"h", s.workspace.height()}};
  j["source"] = {s.source.x, s.source.y};
  j["goals"] = nlohmann::json::array();
  for (const auto& g : s.goals) j["goals"].push_back({g.x, g.y});
  j["robots"] = nlohmann::json::array();
  for (const auto& r : s.robots) {
    j["robots"].push_back(
        {{"id", r.id}, {"pos", {r.position.x, r.position.y}}, {"capacity", r.capacity}, {"speed", r.speed}});
  }
  j["t_service"] = s.t_service;
  j["seed"] = s.seed;
}

inline void from_json(const nlohmann::json& j, Scenario& s) {
  auto pt = [](const nlohmann::json& a) { return Point{a.at(0).get<double>(), a.at(1).get<double>()}; };
  s = Scenario{};
  s.family = parse_family(j.value("family", std::string("custom"))).value_or(Family::Custom);
  s.workspace = Workspace::box(j.at("workspace").at("w").get<double>(), j.at("workspace").at("h").get<double>());
  s.source = pt(j.at("source"));
  for (const auto& g : j.at("goals")) s.goals.push_back(pt(g));
  for (const auto& r : j.at("robots")) {
    s.robots.push_back({r.at("id").get<RobotId>(), pt(r.at("pos")), r.at("capacity").get<int>(),
                        r.at("speed").get<double>()});
  }
  s.t_service = j.at("t_service").get<double>();
  s.seed = j.value("seed", std::uint64_t{0});
}

}  // namespace vcst
