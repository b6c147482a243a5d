#include "twoscale/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twoscale {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Arc-length table for the ellipse, sampled densely in the angular
// parameter. Good to ~1e-12 relative with 1<<14 panels and Simpson weights.
struct EllipseArcTable {
  std::vector<double> phi;
  std::vector<double> s;  // cumulative arc length at phi
  double total = 0.0;
};

EllipseArcTable build_arc_table(double a, double b) {
  const int n = 1 << 14;
  EllipseArcTable t;
  t.phi.resize(n + 1);
  t.s.resize(n + 1);
  auto speed = [&](double phi) {
    const double dx = -a * std::sin(phi);
    const double dy = b * std::cos(phi);
    return std::hypot(dx, dy);
  };
  t.phi[0] = 0.0;
  t.s[0] = 0.0;
  const double dphi = 2.0 * kPi / n;
  for (int i = 0; i < n; ++i) {
    const double p0 = i * dphi;
    const double p1 = (i + 1) * dphi;
    const double mid = 0.5 * (p0 + p1);
    const double ds = dphi / 6.0 * (speed(p0) + 4.0 * speed(mid) + speed(p1));
    t.phi[i + 1] = p1;
    t.s[i + 1] = t.s[i] + ds;
  }
  t.total = t.s[n];
  return t;
}

// Angular parameter at arc-length fraction u in [0,1): table lookup plus
// linear interpolation of the inverse.
double ellipse_angle_at_fraction(const EllipseArcTable& t, double u) {
  const double target = u * t.total;
  auto it = std::upper_bound(t.s.begin(), t.s.end(), target);
  size_t i = std::min<size_t>(t.s.size() - 1, it - t.s.begin());
  if (i == 0) i = 1;
  const double s0 = t.s[i - 1], s1 = t.s[i];
  const double w = (s1 > s0) ? (target - s0) / (s1 - s0) : 0.0;
  return t.phi[i - 1] + w * (t.phi[i] - t.phi[i - 1]);
}

// Distance from q (in ellipse-centered coordinates) to the ellipse
// x^2/a^2 + y^2/b^2 = 1. Solves for the Lagrange multiplier of the
// nearest-point problem by bisection; f is strictly decreasing in t.
double ellipse_distance(double a, double b, Vec2 q) {
  q.x() = std::abs(q.x());
  q.y() = std::abs(q.y());
  auto f = [&](double t) {
    const double fx = a * q.x() / (t + a * a);
    const double fy = b * q.y() / (t + b * b);
    return fx * fx + fy * fy - 1.0;
  };
  // Degenerate axis cases: q on an axis can put the nearest point on the
  // same axis; handle by nudging, accuracy stays well below 1e-12 * scale.
  const double eps = 1e-15 * std::max(a, b);
  if (q.x() < eps && q.y() < eps) return std::min(a, b);
  if (q.x() < eps) q.x() = eps;
  if (q.y() < eps) q.y() = eps;

  double lo = -std::min(a * a, b * b) + 1e-300;
  // move lo up until f(lo) > 0
  {
    double step = 1e-12 * std::max(a * a, b * b);
    while (!(f(lo + step) > 0.0) && step < 1.0) step *= 4.0;
    if (f(lo + step) > 0.0) lo += 0.0;  // keep lo; bisection handles it
  }
  double hi = std::max(a * a, b * b) + std::max(a, b) * q.norm();
  while (f(hi) > 0.0) hi = 2.0 * hi + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double t = 0.5 * (lo + hi);
  const Vec2 p(a * a * q.x() / (t + a * a), b * b * q.y() / (t + b * b));
  return (p - q).norm();
}

}  // namespace

DomainSpec DomainSpec::unit_disk() { return DomainSpec{}; }

DomainSpec DomainSpec::disk(const Vec2& center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("disk radius must be positive");
  DomainSpec d;
  d.kind = Kind::Disk;
  d.center = center;
  d.radius = radius;
  return d;
}

DomainSpec DomainSpec::ellipse(double semi_a, double semi_b, const Vec2& center) {
  if (semi_a <= 0.0 || semi_b <= 0.0)
    throw std::invalid_argument("ellipse semi-axes must be positive");
  DomainSpec d;
  d.kind = Kind::Ellipse;
  d.center = center;
  d.semi_a = semi_a;
  d.semi_b = semi_b;
  return d;
}

DomainSpec DomainSpec::polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3)
    throw std::invalid_argument("polygon needs at least 3 vertices");
  // convexity and counterclockwise orientation
  const int n = static_cast<int>(vertices.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[(i + 1) % n];
    const Vec2& c = vertices[(i + 2) % n];
    if (cross2(b - a, c - b) < 0.0)
      throw std::invalid_argument("polygon must be convex and counterclockwise");
  }
  DomainSpec d;
  d.kind = Kind::Polygon;
  d.vertices = std::move(vertices);
  Vec2 c = Vec2::Zero();
  for (const Vec2& v : d.vertices) c += v;
  d.center = c / static_cast<double>(d.vertices.size());
  return d;
}

double DomainSpec::perimeter() const {
  switch (kind) {
    case Kind::Disk:
      return 2.0 * kPi * radius;
    case Kind::Ellipse: {
      return build_arc_table(semi_a, semi_b).total;
    }
    case Kind::Polygon: {
      double p = 0.0;
      const int n = static_cast<int>(vertices.size());
      for (int i = 0; i < n; ++i) p += (vertices[(i + 1) % n] - vertices[i]).norm();
      return p;
    }
  }
  return 0.0;
}

Vec2 DomainSpec::enclosing_center() const { return center; }

double DomainSpec::enclosing_radius() const {
  switch (kind) {
    case Kind::Disk:
      return radius;
    case Kind::Ellipse:
      return std::max(semi_a, semi_b);
    case Kind::Polygon: {
      double r = 0.0;
      for (const Vec2& v : vertices) r = std::max(r, (v - center).norm());
      return r;
    }
  }
  return 0.0;
}

Vec2 DomainSpec::boundary_point(double t) const {
  t -= std::floor(t);
  switch (kind) {
    case Kind::Disk: {
      const double phi = 2.0 * kPi * t;
      return center + radius * Vec2(std::cos(phi), std::sin(phi));
    }
    case Kind::Ellipse: {
      static thread_local double cached_a = -1.0, cached_b = -1.0;
      static thread_local EllipseArcTable table;
      if (cached_a != semi_a || cached_b != semi_b) {
        table = build_arc_table(semi_a, semi_b);
        cached_a = semi_a;
        cached_b = semi_b;
      }
      const double phi = ellipse_angle_at_fraction(table, t);
      return center + Vec2(semi_a * std::cos(phi), semi_b * std::sin(phi));
    }
    case Kind::Polygon: {
      const int n = static_cast<int>(vertices.size());
      double target = t * perimeter();
      for (int i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        const double len = (b - a).norm();
        if (target <= len || i == n - 1) {
          const double w = std::clamp(target / len, 0.0, 1.0);
          return a + w * (b - a);
        }
        target -= len;
      }
      return vertices[0];
    }
  }
  return center;
}

std::vector<Vec2> DomainSpec::boundary_nodes(int n) const {
  if (n < 3) throw std::invalid_argument("need at least 3 boundary nodes");
  std::vector<Vec2> pts;
  pts.reserve(n);
  if (kind == Kind::Polygon) {
    // Keep the polygon corners: distribute nodes per edge proportionally to
    // length, corners always included, roughly equispaced overall.
    const int nv = static_cast<int>(vertices.size());
    const double target = perimeter() / n;
    for (int i = 0; i < nv; ++i) {
      const Vec2& a = vertices[i];
      const Vec2& b = vertices[(i + 1) % nv];
      const double len = (b - a).norm();
      const int k = std::max(1, static_cast<int>(std::round(len / target)));
      for (int j = 0; j < k; ++j)
        pts.push_back(a + (static_cast<double>(j) / k) * (b - a));
    }
    return pts;
  }
  for (int k = 0; k < n; ++k)
    pts.push_back(boundary_point(static_cast<double>(k) / n));
  return pts;
}

double DomainSpec::distance_to_boundary(const Vec2& p) const {
  switch (kind) {
    case Kind::Disk:
      return std::abs((p - center).norm() - radius);
    case Kind::Ellipse:
      return ellipse_distance(semi_a, semi_b, p - center);
    case Kind::Polygon: {
      double d = std::numeric_limits<double>::infinity();
      const int n = static_cast<int>(vertices.size());
      for (int i = 0; i < n; ++i)
        d = std::min(d, segment_distance(p, vertices[i], vertices[(i + 1) % n]));
      return d;
    }
  }
  return 0.0;
}

Vec2 segment_closest_point(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  return (p - segment_closest_point(p, a, b)).norm();
}

}  // namespace twoscale
