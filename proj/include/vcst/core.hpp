#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vcst {

/// Geometric tolerance in meters.
inline constexpr double kGeomTol = 1e-9;
/// Minimum separation between Voronoi sites.
inline constexpr double kSiteSeparation = 1e-6;

using NodeId = int;
using RobotId = int;
using GoalId = int;
using RelayId = int;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
  friend Point operator*(double s, Point a) { return {a.x * s, a.y * s}; }
  friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
  friend bool operator<(Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

struct Segment {
  Point a;
  Point b;

  double length() const { return distance(a, b); }
};

/// Axis-aligned rectangular workspace.
struct Workspace {
  Point min_corner;
  Point max_corner;

  double width() const { return max_corner.x - min_corner.x; }
  double height() const { return max_corner.y - min_corner.y; }
  bool valid() const { return min_corner.x < max_corner.x && min_corner.y < max_corner.y; }
  bool contains(Point p, double tol = kGeomTol) const {
    return p.x >= min_corner.x - tol && p.x <= max_corner.x + tol && p.y >= min_corner.y - tol &&
           p.y <= max_corner.y + tol;
  }
  static Workspace box(double w, double h) { return {{0.0, 0.0}, {w, h}}; }
};

enum class Errc {
  InvalidArgument,
  DuplicateSites,
  SiteOutsideWorkspace,
  NoSharedEdge,
  EmptyGoals,
  NodeNotFound,
  DisconnectedGraph,
  GoalNotInTrunk,
  InstanceTooLarge,
  ZeroCapacity,
  NoRobots,
  InfeasiblePlan,
  EmptyMatrix,
  SeparationInfeasible,
  UnvalidatedInput,
  Io,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DuplicateSites: return "DuplicateSites";
    case Errc::SiteOutsideWorkspace: return "SiteOutsideWorkspace";
    case Errc::NoSharedEdge: return "NoSharedEdge";
    case Errc::EmptyGoals: return "EmptyGoals";
    case Errc::NodeNotFound: return "NodeNotFound";
    case Errc::DisconnectedGraph: return "DisconnectedGraph";
    case Errc::GoalNotInTrunk: return "GoalNotInTrunk";
    case Errc::InstanceTooLarge: return "InstanceTooLarge";
    case Errc::ZeroCapacity: return "ZeroCapacity";
    case Errc::NoRobots: return "NoRobots";
    case Errc::InfeasiblePlan: return "InfeasiblePlan";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::SeparationInfeasible: return "SeparationInfeasible";
    case Errc::UnvalidatedInput: return "UnvalidatedInput";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Every library failure is reported through this exception type.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace vcst
