#include <catch_amalgamated.hpp>

#include <random>

#include "vcst/geometry.hpp"

using namespace vcst;
using Catch::Approx;

namespace {

std::vector<Point> random_sites(std::mt19937_64& rng, std::size_t n, double side) {
  std::uniform_real_distribution<double> u(1.0, side - 1.0);
  std::vector<Point> out;
  while (out.size() < n) {
    Point p{u(rng), u(rng)};
    bool ok = true;
    for (const auto& q : out) ok = ok && distance(p, q) > 1.0;
    if (ok) out.push_back(p);
  }
  return out;
}

// Owner of p by direct distance comparison.
std::vector<RobotId> nearest_oracle(Point p, const std::vector<Point>& sites) {
  double best = 1e300;
  for (const auto& s : sites) best = std::min(best, distance(p, s));
  std::vector<RobotId> out;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (distance(p, sites[i]) <= best + 1e-9) out.push_back(static_cast<RobotId>(i));
  }
  return out;
}

// Max-leg over a dense sampling of the segment.
std::pair<Point, double> sampled_minimizer(const Segment& s, Point a, Point b, int samples) {
  Point best_p = s.a;
  double best = 1e300;
  for (int k = 0; k <= samples; ++k) {
    double t = static_cast<double>(k) / samples;
    Point q = s.a + (s.b - s.a) * t;
    double leg = std::max(distance(q, a), distance(q, b));
    if (leg < best) {
      best = leg;
      best_p = q;
    }
  }
  return {best_p, best};
}

VoronoiCell cell_with_edge(RobotId owner, Point site, RobotId other, Segment seg) {
  VoronoiCell c;
  c.owner = owner;
  c.site = site;
  c.neighbor_edges.push_back({other, seg});
  return c;
}

}  // namespace

TEST_CASE("two sites split along the bisector") {
  std::vector<Point> sites{{25, 50}, {75, 50}};
  auto cells = compute_voronoi(sites, Workspace::box(100, 100));
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].area() == Approx(5000.0));
  CHECK(cells[1].area() == Approx(5000.0));
  const NeighborEdge* e = cells[0].edge_with(1);
  REQUIRE(e != nullptr);
  CHECK(e->segment.a.x == Approx(50.0));
  CHECK(e->segment.b.x == Approx(50.0));
  CHECK(std::min(e->segment.a.y, e->segment.b.y) == Approx(0.0).margin(1e-12));
  CHECK(std::max(e->segment.a.y, e->segment.b.y) == Approx(100.0));
  // Same segment stored for both owners.
  const NeighborEdge* back = cells[1].edge_with(0);
  REQUIRE(back != nullptr);
  CHECK(back->segment.a == e->segment.a);
  CHECK(back->segment.b == e->segment.b);
}

TEST_CASE("single site owns the workspace") {
  std::vector<Point> sites{{50, 50}};
  auto cells = compute_voronoi(sites, Workspace::box(100, 100));
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].area() == Approx(10000.0));
  CHECK(cells[0].polygon.size() == 4);
  CHECK(cells[0].neighbor_edges.empty());
  CHECK(relay_candidates(cells).empty());
}

TEST_CASE("four symmetric sites give congruent cells meeting at the centre") {
  std::vector<Point> sites{{25, 25}, {75, 25}, {75, 75}, {25, 75}};
  auto cells = compute_voronoi(sites, Workspace::box(100, 100));
  REQUIRE(cells.size() == 4);
  for (const auto& c : cells) {
    CHECK(c.area() == Approx(2500.0));
    bool has_centre = false;
    for (const auto& p : c.polygon) has_centre = has_centre || distance(p, {50, 50}) < 1e-9;
    CHECK(has_centre);
  }
  // Membership oracle on a grid.
  for (int x = 1; x < 100; x += 3) {
    for (int y = 1; y < 100; y += 3) {
      Point p{x + 0.5, y + 0.5};
      auto owners = nearest_oracle(p, sites);
      for (auto o : owners) CHECK(cells[static_cast<std::size_t>(o)].contains(p));
    }
  }
  // Diagonal cells touch only at the centre: not adjacent.
  CHECK(cells[0].edge_with(2) == nullptr);
  CHECK(cells[1].edge_with(3) == nullptr);
  CHECK(relay_candidates(cells).size() == 4);
}

TEST_CASE("invalid site sets are rejected") {
  auto ws = Workspace::box(100, 100);
  std::vector<Point> dup{{10, 10}, {10, 10}};
  CHECK_THROWS_MATCHES(compute_voronoi(dup, ws), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == Errc::DuplicateSites; }));
  std::vector<Point> outside{{10, 10}, {150, 10}};
  CHECK_THROWS_MATCHES(
      compute_voronoi(outside, ws), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == Errc::SiteOutsideWorkspace; }));
}

TEST_CASE("cells tile the workspace") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 200.0);
  for (int trial = 0; trial < 5; ++trial) {
    auto sites = random_sites(rng, 3 + trial * 2, 200.0);
    auto cells = compute_voronoi(sites, Workspace::box(200, 200));
    double area = 0.0;
    for (const auto& c : cells) area += c.area();
    CHECK(area == Approx(40000.0).epsilon(1e-9));
    for (int k = 0; k < 2000; ++k) {
      Point p{u(rng), u(rng)};
      auto owners = nearest_oracle(p, sites);
      bool inside_owner = false;
      for (auto o : owners) inside_owner = inside_owner || cells[static_cast<std::size_t>(o)].contains(p);
      CHECK(inside_owner);
      for (std::size_t i = 0; i < cells.size(); ++i) {
        bool is_owner = std::find(owners.begin(), owners.end(), static_cast<RobotId>(i)) != owners.end();
        if (!is_owner) CHECK_FALSE(cells[i].contains(p, -1e-9));
      }
    }
  }
}

TEST_CASE("adjacency count respects the planar bound") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t m = 3 + static_cast<std::size_t>(trial % 8);
    auto sites = random_sites(rng, m, 300.0);
    auto q = relay_candidates(compute_voronoi(sites, Workspace::box(300, 300)));
    CHECK(q.size() <= 3 * m - 6);
    CHECK(q.size() >= m - 1);
    for (std::size_t k = 1; k < q.size(); ++k) {
      CHECK(std::tie(q[k - 1].i, q[k - 1].j) < std::tie(q[k].i, q[k].j));
    }
  }
}

TEST_CASE("relay point at the bisector foot") {
  Point a{0, 0}, b{10, 0};
  Segment seg{{5, -10}, {5, 10}};
  auto r = relay_point(cell_with_edge(0, a, 1, seg), cell_with_edge(1, b, 0, seg));
  CHECK(r.position.x == Approx(5.0));
  CHECK(r.position.y == Approx(0.0).margin(1e-12));
  CHECK(r.max_leg == Approx(5.0));
}

TEST_CASE("relay point clamps to the nearest endpoint") {
  Point a{0, 0}, b{10, 0};
  Segment seg{{5, 3}, {5, 10}};
  auto r = relay_point(cell_with_edge(0, a, 1, seg), cell_with_edge(1, b, 0, seg));
  CHECK(r.position.x == Approx(5.0));
  CHECK(r.position.y == Approx(3.0));
  CHECK(r.max_leg == Approx(std::sqrt(34.0)));
}

TEST_CASE("relay point requires a shared edge") {
  VoronoiCell a, b;
  a.owner = 0;
  b.owner = 1;
  CHECK_THROWS_AS(relay_point(a, b), Error);
}

TEST_CASE("relay point matches a dense sampling minimiser") {
  std::mt19937_64 rng(2024);
  int pairs = 0;
  while (pairs < 120) {
    auto sites = random_sites(rng, 2 + rng() % 6, 100.0);
    auto cells = compute_voronoi(sites, Workspace::box(100, 100));
    for (const auto& rc : relay_candidates(cells)) {
      const auto& ci = cells[static_cast<std::size_t>(rc.i)];
      const auto& seg = ci.edge_with(rc.j)->segment;
      auto [p, leg] = sampled_minimizer(seg, sites[static_cast<std::size_t>(rc.i)],
                                        sites[static_cast<std::size_t>(rc.j)], 10000);
      CHECK(rc.max_leg <= leg + 1e-6);
      // Distance from the analytic point to the segment.
      Point d = seg.b - seg.a;
      double t = std::clamp(dot(rc.position - seg.a, d) / dot(d, d), 0.0, 1.0);
      CHECK(distance(rc.position, seg.a + d * t) <= 1e-9);
      // The sampled minimiser sits within one sample spacing of the analytic point.
      CHECK(distance(p, rc.position) <= seg.length() / 10000.0 + 1e-6);
      ++pairs;
    }
  }
}

TEST_CASE("relay point is symmetric bit for bit") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    auto sites = random_sites(rng, 6, 150.0);
    auto cells = compute_voronoi(sites, Workspace::box(150, 150));
    for (const auto& c : cells) {
      for (const auto& e : c.neighbor_edges) {
        auto ij = relay_point(c, cells[static_cast<std::size_t>(e.neighbor)]);
        auto ji = relay_point(cells[static_cast<std::size_t>(e.neighbor)], c);
        CHECK(ij.position.x == ji.position.x);
        CHECK(ij.position.y == ji.position.y);
        CHECK(ij.max_leg == ji.max_leg);
      }
    }
  }
}

TEST_CASE("voronoi output is deterministic") {
  std::mt19937_64 rng(3);
  auto sites = random_sites(rng, 9, 300.0);
  auto a = compute_voronoi(sites, Workspace::box(300, 300));
  auto b = compute_voronoi(sites, Workspace::box(300, 300));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].polygon.size() == b[i].polygon.size());
    for (std::size_t k = 0; k < a[i].polygon.size(); ++k) CHECK(a[i].polygon[k] == b[i].polygon[k]);
  }
  auto qa = relay_candidates(a);
  auto qb = relay_candidates(b);
  REQUIRE(qa.size() == qb.size());
  for (std::size_t k = 0; k < qa.size(); ++k) CHECK(qa[k].position == qb[k].position);
}

TEST_CASE("cells are counterclockwise and inside the workspace") {
  std::mt19937_64 rng(8);
  auto ws = Workspace::box(120, 80);
  std::uniform_real_distribution<double> ux(1, 119), uy(1, 79);
  std::vector<Point> sites;
  for (int k = 0; k < 7; ++k) sites.push_back({ux(rng), uy(rng)});
  for (const auto& c : compute_voronoi(sites, ws)) {
    CHECK(c.area() > 0.0);
    for (const auto& p : c.polygon) CHECK(ws.contains(p));
    CHECK(c.contains(c.site));
  }
}
