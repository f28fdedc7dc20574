#include "motm/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace motm {

double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double angle_diff(double a, double b) { return normalize_angle(a - b); }

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("ConvexPolygon: need at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    const Vec2& c = vertices_[(i + 2) % n];
    if ((b - a).cross(c - b) < -1e-12) {
      throw std::invalid_argument("ConvexPolygon: vertices not convex and counter-clockwise");
    }
  }
  if (area() <= 0.0) throw std::invalid_argument("ConvexPolygon: degenerate area");
}

ConvexPolygon ConvexPolygon::disc(Vec2 center, double radius, int sides) {
  if (radius <= 0.0 || sides < 3) throw std::invalid_argument("ConvexPolygon::disc: bad parameters");
  const double vertex_radius = radius / std::cos(kPi / sides);
  std::vector<Vec2> v;
  v.reserve(sides);
  for (int i = 0; i < sides; ++i) {
    // Offset by half a step so that a flat edge faces each axis direction.
    const double a = 2.0 * kPi * (i + 0.5) / sides;
    v.push_back({center.x + vertex_radius * std::cos(a), center.y + vertex_radius * std::sin(a)});
  }
  return ConvexPolygon(std::move(v));
}

ConvexPolygon ConvexPolygon::rectangle(Vec2 center, double width, double height) {
  const double hw = 0.5 * width, hh = 0.5 * height;
  return ConvexPolygon({{center.x - hw, center.y - hh},
                        {center.x + hw, center.y - hh},
                        {center.x + hw, center.y + hh},
                        {center.x - hw, center.y + hh}});
}

double ConvexPolygon::area() const {
  double s = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    s += vertices_[i].cross(vertices_[(i + 1) % vertices_.size()]);
  }
  return 0.5 * s;
}

Vec2 ConvexPolygon::centroid() const {
  Vec2 c;
  for (const auto& v : vertices_) c = c + v;
  return c * (1.0 / static_cast<double>(vertices_.size()));
}

bool ConvexPolygon::contains(Vec2 p) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    if ((b - a).cross(p - a) < 0.0) return false;
  }
  return true;
}

bool ConvexPolygon::strictly_contains(Vec2 p, double eps) const {
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    const Vec2 e = b - a;
    if (e.cross(p - a) <= eps * e.norm()) return false;
  }
  return true;
}

double ConvexPolygon::boundary_distance(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, point_segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
  }
  return best;
}

double project_onto_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 <= 0.0) return 0.0;
  return std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double t = project_onto_segment(p, a, b);
  return distance(p, a + (b - a) * t);
}

bool segment_intersects_polygon(Vec2 a, Vec2 b, const ConvexPolygon& poly) {
  // Cyrus-Beck clipping against the closed half-planes of each edge.
  const Vec2 d = b - a;
  double t_enter = 0.0;
  double t_exit = 1.0;
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e = v[(i + 1) % n] - v[i];
    // Inside means e x (p - v_i) >= 0; along the segment that is num + t * den >= 0.
    const double num = e.cross(a - v[i]);
    const double den = e.cross(d);
    if (den == 0.0) {
      if (num < 0.0) return false;
      continue;
    }
    const double t = -num / den;
    if (den > 0.0) {
      t_enter = std::max(t_enter, t);
    } else {
      t_exit = std::min(t_exit, t);
    }
    if (t_enter > t_exit) return false;
  }
  // The clipped interval must reach into the open parameter range (0, 1).
  return t_exit > 0.0 && t_enter < 1.0;
}

ConvexPolygon inflate_polygon(const ConvexPolygon& poly, double r) {
  if (r < 0.0) throw std::invalid_argument("inflate_polygon: negative radius");
  if (r == 0.0) return poly;
  const auto& v = poly.vertices();
  const std::size_t n = v.size();
  std::vector<Vec2> out;
  out.reserve(n);
  auto outward_normal = [&](std::size_t i) {
    const Vec2 e = v[(i + 1) % n] - v[i];
    const double len = e.norm();
    return Vec2{e.y / len, -e.x / len};
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 n_prev = outward_normal((i + n - 1) % n);
    const Vec2 n_next = outward_normal(i);
    const double c = n_prev.dot(n_next);
    out.push_back(v[i] + (n_prev + n_next) * (r / (1.0 + c)));
  }
  return ConvexPolygon(std::move(out));
}

}  // namespace motm
