#pragma once

#include <Eigen/Dense>

#include <vector>

namespace twoscale {

using Vec2 = Eigen::Vector2d;

/// Convex computational domains: disks, ellipses, and convex polygons
/// (the latter typically sampled from a convex curve). The boundary is
/// parameterized by arc length so that mesh generation can place nodes
/// equispaced on it.
struct DomainSpec {
  enum class Kind { Disk, Ellipse, Polygon };

  Kind kind = Kind::Disk;
  Vec2 center = Vec2::Zero();
  double radius = 1.0;                 // Disk
  double semi_a = 1.0, semi_b = 1.0;   // Ellipse semi-axes
  std::vector<Vec2> vertices;          // Polygon, counterclockwise

  static DomainSpec unit_disk();
  static DomainSpec disk(const Vec2& center, double radius);
  static DomainSpec ellipse(double semi_a, double semi_b,
                            const Vec2& center = Vec2::Zero());
  static DomainSpec polygon(std::vector<Vec2> vertices);

  double perimeter() const;

  /// Center and radius of a ball guaranteed to contain the closed domain.
  Vec2 enclosing_center() const;
  double enclosing_radius() const;

  /// Point on the boundary at arc-length fraction t in [0,1), counterclockwise.
  Vec2 boundary_point(double t) const;

  /// n boundary points equispaced in arc length, counterclockwise.
  std::vector<Vec2> boundary_nodes(int n) const;

  /// Euclidean distance from p to the analytic boundary curve.
  double distance_to_boundary(const Vec2& p) const;
};

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Signed area of triangle (a, b, c); positive for counterclockwise order.
inline double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * cross2(b - a, c - a);
}

/// Distance from p to the closed segment [a, b].
double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Nearest point to p on the closed segment [a, b].
Vec2 segment_closest_point(const Vec2& p, const Vec2& a, const Vec2& b);

}  // namespace twoscale
