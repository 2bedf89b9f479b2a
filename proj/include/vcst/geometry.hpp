#pragma once

// Bounded Voronoi partition of a rectangular workspace and relay candidates on
// shared cell boundaries.

#include <algorithm>
#include <span>
#include <vector>

#include "vcst/core.hpp"

namespace vcst {

struct NeighborEdge {
  RobotId neighbor = -1;
  Segment segment;  // endpoints in lexicographic order
};

struct VoronoiCell {
  RobotId owner = -1;
  Point site;
  std::vector<Point> polygon;  // convex, counterclockwise
  std::vector<NeighborEdge> neighbor_edges;

  double area() const {
    double a = 0.0;
    for (std::size_t k = 0; k < polygon.size(); ++k) {
      a += cross(polygon[k], polygon[(k + 1) % polygon.size()]);
    }
    return 0.5 * a;
  }

  bool contains(Point p, double tol = kGeomTol) const {
    if (polygon.size() < 3) return false;
    for (std::size_t k = 0; k < polygon.size(); ++k) {
      Point a = polygon[k];
      Point b = polygon[(k + 1) % polygon.size()];
      Point e = b - a;
      double len = norm(e);
      if (len == 0.0) continue;
      if (cross(e, p - a) / len < -tol) return false;
    }
    return true;
  }

  const NeighborEdge* edge_with(RobotId other) const {
    for (const auto& e : neighbor_edges) {
      if (e.neighbor == other) return &e;
    }
    return nullptr;
  }
};

struct RelayCandidate {
  Point position;
  RobotId i = -1;  // i < j
  RobotId j = -1;
  double max_leg = 0.0;
};

namespace detail {

// Polygon vertex plus the label of the edge leaving it: -1 for the workspace
// boundary, otherwise the id of the site whose bisector produced the edge.
struct LabeledVertex {
  Point p;
  int label;
};

inline std::vector<LabeledVertex> clip_halfplane(const std::vector<LabeledVertex>& poly, Point keep_site,
                                                 Point other_site, int other_label) {
  // Keep points closer to keep_site: dot(x - mid, dir) <= 0.
  Point mid = (keep_site + other_site) * 0.5;
  Point dir = other_site - keep_site;
  dir = dir * (1.0 / norm(dir));
  auto side = [&](Point x) { return dot(x - mid, dir); };

  std::vector<LabeledVertex> out;
  out.reserve(poly.size() + 2);
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const LabeledVertex& cur = poly[k];
    const LabeledVertex& nxt = poly[(k + 1) % poly.size()];
    double sc = side(cur.p);
    double sn = side(nxt.p);
    bool cin = sc <= 0.0;
    bool nin = sn <= 0.0;
    if (cin && nin) {
      out.push_back(cur);
    } else if (cin && !nin) {
      double t = sc / (sc - sn);
      out.push_back(cur);
      out.push_back({cur.p + (nxt.p - cur.p) * t, other_label});
    } else if (!cin && nin) {
      double t = sc / (sc - sn);
      out.push_back({cur.p + (nxt.p - cur.p) * t, cur.label});
    }
  }
  return out;
}

inline void clean_polygon(std::vector<LabeledVertex>& poly) {
  // Drop vertices whose outgoing edge is degenerate.
  bool changed = true;
  while (changed && poly.size() > 2) {
    changed = false;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const auto& nxt = poly[(k + 1) % poly.size()];
      if (distance(poly[k].p, nxt.p) <= kGeomTol * 1e-3) {
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
  // Merge consecutive collinear edges carrying the same label.
  changed = true;
  while (changed && poly.size() > 3) {
    changed = false;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      std::size_t prev = (k + poly.size() - 1) % poly.size();
      std::size_t next = (k + 1) % poly.size();
      Point e0 = poly[k].p - poly[prev].p;
      Point e1 = poly[next].p - poly[k].p;
      bool collinear = std::abs(cross(e0, e1)) <= 1e-12 * norm(e0) * norm(e1);
      if (poly[prev].label == poly[k].label && (poly[k].label >= 0 || collinear)) {
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
}

inline Segment canonical(Segment s) {
  if (s.b < s.a) std::swap(s.a, s.b);
  return s;
}

}  // namespace detail

/// Bounded Voronoi cells by per-site half-plane intersection with the workspace.
inline std::vector<VoronoiCell> compute_voronoi(std::span<const Point> sites, const Workspace& ws) {
  if (!ws.valid()) throw Error(Errc::InvalidArgument, "workspace corners are not ordered");
  if (sites.empty()) throw Error(Errc::InvalidArgument, "at least one site is required");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (!ws.contains(sites[i])) {
      throw Error(Errc::SiteOutsideWorkspace, "site " + std::to_string(i) + " lies outside the workspace");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (distance(sites[i], sites[j]) < kSiteSeparation) {
        throw Error(Errc::DuplicateSites,
                    "sites " + std::to_string(j) + " and " + std::to_string(i) + " coincide");
      }
    }
  }

  const Point lo = ws.min_corner;
  const Point hi = ws.max_corner;
  std::vector<std::vector<detail::LabeledVertex>> raw(sites.size());
  std::vector<VoronoiCell> cells(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::vector<detail::LabeledVertex> poly{
        {lo, -1}, {{hi.x, lo.y}, -1}, {hi, -1}, {{lo.x, hi.y}, -1}};
    for (std::size_t j = 0; j < sites.size() && !poly.empty(); ++j) {
      if (j == i) continue;
      poly = detail::clip_halfplane(poly, sites[i], sites[j], static_cast<int>(j));
    }
    detail::clean_polygon(poly);
    cells[i].owner = static_cast<RobotId>(i);
    cells[i].site = sites[i];
    for (const auto& v : poly) cells[i].polygon.push_back(v.p);
    raw[i] = std::move(poly);
  }

  // Shared edges are taken from the lower-id owner and copied to the other so
  // both records are bit-identical.
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto& poly = raw[i];
    for (std::size_t k = 0; k < poly.size(); ++k) {
      int j = poly[k].label;
      if (j <= static_cast<int>(i)) continue;
      Segment seg = detail::canonical({poly[k].p, poly[(k + 1) % poly.size()].p});
      if (seg.length() <= kGeomTol) continue;
      cells[i].neighbor_edges.push_back({j, seg});
      cells[static_cast<std::size_t>(j)].neighbor_edges.push_back({static_cast<RobotId>(i), seg});
    }
  }
  for (auto& c : cells) {
    std::sort(c.neighbor_edges.begin(), c.neighbor_edges.end(),
              [](const NeighborEdge& a, const NeighborEdge& b) { return a.neighbor < b.neighbor; });
  }
  return cells;
}

/// Point on the shared boundary minimizing the longer of the two robots' legs.
inline RelayCandidate relay_point(const VoronoiCell& cell_i, const VoronoiCell& cell_j) {
  const VoronoiCell& lo = cell_i.owner < cell_j.owner ? cell_i : cell_j;
  const VoronoiCell& hi = cell_i.owner < cell_j.owner ? cell_j : cell_i;
  const NeighborEdge* edge = lo.edge_with(hi.owner);
  if (edge == nullptr || edge->segment.length() <= kGeomTol) {
    throw Error(Errc::NoSharedEdge, "cells " + std::to_string(lo.owner) + " and " +
                                        std::to_string(hi.owner) + " share no boundary segment");
  }
  const Segment& s = edge->segment;
  Point d = s.b - s.a;
  Point mid = (lo.site + hi.site) * 0.5;
  double t = std::clamp(dot(mid - s.a, d) / dot(d, d), 0.0, 1.0);
  Point q = s.a + d * t;
  return {q, lo.owner, hi.owner, std::max(distance(q, lo.site), distance(q, hi.site))};
}

/// One relay candidate per adjacent cell pair, ordered by (i, j).
inline std::vector<RelayCandidate> relay_candidates(std::span<const VoronoiCell> cells) {
  std::vector<RelayCandidate> out;
  for (const auto& c : cells) {
    for (const auto& e : c.neighbor_edges) {
      if (e.neighbor <= c.owner) continue;
      auto it = std::find_if(cells.begin(), cells.end(),
                             [&](const VoronoiCell& o) { return o.owner == e.neighbor; });
      if (it == cells.end()) continue;
      out.push_back(relay_point(c, *it));
    }
  }
  std::sort(out.begin(), out.end(), [](const RelayCandidate& a, const RelayCandidate& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return out;
}

/// Ids of all sites within tol of the minimum distance to p.
inline std::vector<RobotId> nearest_sites(Point p, std::span<const Point> sites, double tol = kGeomTol) {
  std::vector<RobotId> out;
  if (sites.empty()) return out;
  double best = distance(p, sites[0]);
  for (std::size_t i = 1; i < sites.size(); ++i) best = std::min(best, distance(p, sites[i]));
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (distance(p, sites[i]) <= best + tol) out.push_back(static_cast<RobotId>(i));
  }
  return out;
}

}  // namespace vcst
