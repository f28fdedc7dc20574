#include <doctest.h>

#include <random>
#include <stdexcept>

#include "motm/geometry.hpp"

using namespace motm;

namespace {

// Wraps by repeated addition/subtraction of 2 pi.
double wrap_loop(double a) {
  while (a > kPi) a -= 2 * kPi;
  while (a <= -kPi) a += 2 * kPi;
  return a;
}

ConvexPolygon unit_square() { return ConvexPolygon::rectangle({0, 0}, 1.0, 1.0); }

// Point-in-polygon via half-plane checks, written independently of the library.
bool inside_ccw(const std::vector<Vec2>& v, Vec2 p) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i], b = v[(i + 1) % v.size()];
    if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("angle_diff examples") {
  CHECK(angle_diff(0, 0) == 0.0);
  CHECK(angle_diff(kPi / 2, -kPi / 2) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(angle_diff(3.0, -3.0) == doctest::Approx(wrap_loop(6.0)).epsilon(1e-12));
  CHECK(angle_diff(3.0, -3.0) == doctest::Approx(-0.283185307).epsilon(1e-9));
}

TEST_CASE("normalize_angle range is (-pi, pi]") {
  CHECK(normalize_angle(kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(3 * kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(2 * kPi) == doctest::Approx(0.0));
  CHECK(Pose2D(0, 0, -kPi).theta() == doctest::Approx(kPi));
}

TEST_CASE("angle_diff properties on random samples") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = u(rng), b = u(rng);
    const double d = angle_diff(a, b);
    CHECK(d > -kPi);
    CHECK(d <= kPi);
    CHECK(d == doctest::Approx(wrap_loop(a - b)).epsilon(1e-9));
    if (d != kPi) CHECK(angle_diff(b, a) == doctest::Approx(-d).epsilon(1e-12));
    CHECK(std::abs(angle_diff(normalize_angle(d + b), a)) < 1e-9);
  }
}

TEST_CASE("point_segment_distance examples") {
  CHECK(point_segment_distance({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({2, 0}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({0.3, 0.4}, {0, 0}, {0, 0}) == doctest::Approx(0.5));
  CHECK(project_onto_segment({0.5, 3}, {0, 0}, {2, 0}) == doctest::Approx(0.25));
  CHECK(project_onto_segment({-5, 0}, {0, 0}, {2, 0}) == 0.0);
}

TEST_CASE("ConvexPolygon validation and shapes") {
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}}), std::invalid_argument);
  // Non-convex dart.
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {2, 0}, {1, 0.3}, {1, 2}}), std::invalid_argument);

  const auto sq = unit_square();
  CHECK(sq.area() == doctest::Approx(1.0));
  CHECK(sq.contains({0.5, 0.5}));
  CHECK_FALSE(sq.strictly_contains({0.5, 0.5}));
  CHECK(sq.strictly_contains({0.1, -0.2}));
  CHECK(sq.boundary_distance({1.5, 0}) == doctest::Approx(1.0));

  const auto d = ConvexPolygon::disc({1, 2}, 0.3);
  CHECK(d.size() == 16);
  // Circumscribed: every edge is tangent to the disc.
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Vec2 a = d.vertices()[i], b = d.vertices()[(i + 1) % d.size()];
    CHECK(point_segment_distance({1, 2}, a, b) == doctest::Approx(0.3).epsilon(1e-12));
  }
  const Vec2 c = d.centroid();
  CHECK(c.x == doctest::Approx(1.0));
  CHECK(c.y == doctest::Approx(2.0));
}

TEST_CASE("segment_intersects_polygon examples") {
  const auto sq = unit_square();
  CHECK_FALSE(segment_intersects_polygon({1, -2}, {1, 2}, sq));
  CHECK(segment_intersects_polygon({-2, -2}, {2, 2}, sq));
  // Collinear with and overlapping the top edge.
  CHECK(segment_intersects_polygon({-1, 0.5}, {0, 0.5}, sq));
  // Grazing one vertex.
  CHECK(segment_intersects_polygon({0, 1}, {1, 0}, sq));
  CHECK_FALSE(segment_intersects_polygon({0.01, 1}, {1, 0.01}, sq));
}

TEST_CASE("segment_intersects_polygon agrees with dense sampling") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> s(0.3, 1.5);
  int hits = 0, misses = 0, checked = 0;
  for (int i = 0; i < 600; ++i) {
    const auto poly = ConvexPolygon::disc({u(rng) * 0.5, u(rng) * 0.5}, s(rng), 3 + i % 9);
    const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
    bool sampled = false;
    for (int k = 1; k < 1000; ++k) {
      if (inside_ccw(poly.vertices(), a + (b - a) * (k / 1000.0))) {
        sampled = true;
        break;
      }
    }
    const bool exact = segment_intersects_polygon(a, b, poly);
    // Sampling can miss a sliver near a vertex; only check when the segment
    // is clearly inside or clearly away.
    double min_d = 1e9;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      min_d = std::min(min_d, point_segment_distance(poly.vertices()[k], a, b));
    }
    if (!sampled && exact && min_d < 0.01) continue;
    ++checked;
    CHECK(exact == sampled);
    (exact ? hits : misses)++;
  }
  CHECK(checked > 550);
  CHECK(hits > 50);
  CHECK(misses > 50);
}

TEST_CASE("inflate_polygon examples") {
  const auto sq = unit_square();
  const auto same = inflate_polygon(sq, 0.0);
  REQUIRE(same.size() == sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    CHECK(same.vertices()[i].x == doctest::Approx(sq.vertices()[i].x));
    CHECK(same.vertices()[i].y == doctest::Approx(sq.vertices()[i].y));
  }

  // Corners move 0.1 * sqrt(2) along their diagonals, edges move out 0.1.
  const auto big = inflate_polygon(sq, 0.1);
  for (const Vec2& v : big.vertices()) {
    CHECK(std::abs(v.x) == doctest::Approx(0.6));
    CHECK(std::abs(v.y) == doctest::Approx(0.6));
    CHECK(v.norm() == doctest::Approx(0.5 * std::sqrt(2.0) + 0.1 * std::sqrt(2.0)));
  }
  CHECK_THROWS_AS(inflate_polygon(sq, -0.1), std::invalid_argument);
}

TEST_CASE("inflate_polygon contains the Minkowski sum") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto poly = ConvexPolygon::disc({u(rng), u(rng)}, 0.2 + u(rng), 3 + trial % 10);
    const double r = 0.1;
    const auto inf = inflate_polygon(poly, r);
    for (const Vec2& v : poly.vertices()) CHECK(inf.strictly_contains(v));
    // Random points within r of the original polygon.
    for (int k = 0; k < 300; ++k) {
      const Vec2 c = poly.centroid();
      const Vec2 p{c.x + (u(rng) - 0.5) * 4, c.y + (u(rng) - 0.5) * 4};
      const bool within = poly.contains(p) || poly.boundary_distance(p) < r - 1e-9;
      if (within) CHECK(inf.strictly_contains(p, 1e-12));
    }
  }
}
