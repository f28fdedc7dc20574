#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace motm {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2&) const = default;

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double angle() const { return std::atan2(y, x); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

/// Signed shortest difference a - b, in (-pi, pi].
double angle_diff(double a, double b);

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Planar pose. The heading is kept normalized to (-pi, pi].
class Pose2D {
 public:
  Pose2D() = default;
  Pose2D(double x, double y, double theta) : x_(x), y_(y), theta_(normalize_angle(theta)) {}
  Pose2D(Vec2 p, double theta) : Pose2D(p.x, p.y, theta) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  Vec2 position() const { return {x_, y_}; }

  void set_position(Vec2 p) {
    x_ = p.x;
    y_ = p.y;
  }
  void set_theta(double theta) { theta_ = normalize_angle(theta); }

  bool operator==(const Pose2D&) const = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

/// Velocity command: forward speed (m/s) and yaw rate (rad/s).
struct Twist {
  double v = 0.0;
  double omega = 0.0;

  bool operator==(const Twist&) const = default;
};

/// Convex polygon with counter-clockwise winding. Construction validates
/// convexity and non-zero area and throws std::invalid_argument otherwise.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  /// Regular polygon circumscribing a disc (apothem == radius).
  static ConvexPolygon disc(Vec2 center, double radius, int sides = 16);
  static ConvexPolygon rectangle(Vec2 center, double width, double height);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  double area() const;
  Vec2 centroid() const;

  /// Closed containment test (boundary counts as inside).
  bool contains(Vec2 p) const;
  bool strictly_contains(Vec2 p, double eps = 1e-12) const;
  /// Distance from p to the polygon boundary.
  double boundary_distance(Vec2 p) const;

 private:
  std::vector<Vec2> vertices_;
};

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Closest point on segment [a, b] to p, as a parameter in [0, 1].
double project_onto_segment(Vec2 p, Vec2 a, Vec2 b);

/// True iff some point of the open segment (a, b) lies in the closed polygon.
/// Grazing a single vertex or running along an edge counts as intersecting.
bool segment_intersects_polygon(Vec2 a, Vec2 b, const ConvexPolygon& poly);

/// Offsets every edge outward by r. Vertices move along their bisectors by
/// r / cos(half exterior angle), so the result contains the Minkowski sum of
/// the polygon with a disc of radius r.
ConvexPolygon inflate_polygon(const ConvexPolygon& poly, double r);

}  // namespace motm
