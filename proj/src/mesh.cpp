#include "twoscale/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace twoscale {

namespace {

constexpr double kPi = 3.14159265358979323846;

double dist2(const Vec2& a, const Vec2& b) { return (a - b).squaredNorm(); }

// ---------------------------------------------------------------------------
// Bowyer-Watson Delaunay triangulation.
//
// Points are inserted into a super-triangle; the cavity of circumcircles
// containing the new point is carved out and re-fanned. The in-circle test
// uses a relative guard so exactly cocircular boundary nodes (all disk
// boundary nodes are) resolve consistently to "not inside".
// ---------------------------------------------------------------------------

struct DTri {
  std::array<int, 3> v;    // counterclockwise
  std::array<int, 3> adj;  // across edge opposite v[k]; -1 if none
  bool alive = true;
};

class Delaunay {
 public:
  explicit Delaunay(const std::vector<Vec2>& pts) : pts_(pts) {
    Vec2 lo = pts[0], hi = pts[0];
    for (const Vec2& p : pts) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vec2 c = 0.5 * (lo + hi);
    const double s = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12}) * 64.0;
    n_real_ = static_cast<int>(pts.size());
    all_ = pts;
    all_.push_back(c + Vec2(-3.0 * s, -s));
    all_.push_back(c + Vec2(3.0 * s, -s));
    all_.push_back(c + Vec2(0.0, 3.0 * s));
    tris_.push_back(DTri{{n_real_, n_real_ + 1, n_real_ + 2}, {-1, -1, -1}, true});
    last_ = 0;
    for (int i = 0; i < n_real_; ++i) insert(i);
  }

  std::vector<std::array<int, 3>> real_triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const DTri& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= n_real_ || t.v[1] >= n_real_ || t.v[2] >= n_real_) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  double orient(int a, int b, int p) const {
    return cross2(all_[b] - all_[a], all_[p] - all_[a]);
  }

  // > 0 when p is strictly inside the circumcircle of the CCW triangle.
  bool in_circle(const DTri& t, int p) const {
    const Vec2 a = all_[t.v[0]] - all_[p];
    const Vec2 b = all_[t.v[1]] - all_[p];
    const Vec2 c = all_[t.v[2]] - all_[p];
    const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
    const double det = a.x() * (b.y() * c2 - c.y() * b2) -
                       a.y() * (b.x() * c2 - c.x() * b2) +
                       a2 * (b.x() * c.y() - c.x() * b.y());
    const double m = std::max({a2, b2, c2});
    return det > 1e-12 * m * m;
  }

  int find_containing(int p) {
    int cur = last_;
    for (int step = 0; step < 4 * static_cast<int>(tris_.size()) + 16; ++step) {
      const DTri& t = tris_[cur];
      int worst = -1;
      double worst_val = -1e-13;
      for (int k = 0; k < 3; ++k) {
        // edge opposite v[k] is (v[k+1], v[k+2])
        const double o = orient(t.v[(k + 1) % 3], t.v[(k + 2) % 3], p);
        if (o < worst_val) {
          worst_val = o;
          worst = k;
        }
      }
      if (worst < 0) return cur;
      const int nxt = t.adj[worst];
      if (nxt < 0) return cur;  // clamped at hull; treat as containing
      cur = nxt;
    }
    // Fallback: linear scan (should not happen on valid input).
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      if (!tris_[i].alive) continue;
      const DTri& t = tris_[i];
      bool ok = true;
      for (int k = 0; k < 3 && ok; ++k)
        ok = orient(t.v[(k + 1) % 3], t.v[(k + 2) % 3], p) >= -1e-13;
      if (ok) return i;
    }
    throw std::runtime_error("Delaunay: point location failed");
  }

  void insert(int p) {
    const int t0 = find_containing(p);
    // Grow the cavity of triangles whose circumcircle contains p.
    std::vector<int> bad;
    std::vector<char> in_bad(tris_.size(), 0);
    std::vector<int> stack{t0};
    in_bad[t0] = 1;
    while (!stack.empty()) {
      const int ti = stack.back();
      stack.pop_back();
      bad.push_back(ti);
      for (int k = 0; k < 3; ++k) {
        const int nb = tris_[ti].adj[k];
        if (nb < 0 || in_bad[nb] || !tris_[nb].alive) continue;
        if (in_circle(tris_[nb], p)) {
          in_bad[nb] = 1;
          stack.push_back(nb);
        }
      }
    }
    // Cavity boundary edges, oriented counterclockwise seen from inside.
    struct Edge {
      int a, b, outer;
    };
    std::vector<Edge> loop;
    for (int ti : bad) {
      const DTri& t = tris_[ti];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.adj[k];
        if (nb >= 0 && in_bad[nb]) continue;
        loop.push_back(Edge{t.v[(k + 1) % 3], t.v[(k + 2) % 3], nb});
      }
    }
    for (int ti : bad) tris_[ti].alive = false;

    // Fan the cavity from p. Triangles (p, a, b) link to each other along
    // the (p, *) edges and to the outer neighbor along (a, b).
    std::map<int, int> by_first;  // a -> new triangle index
    std::vector<int> fresh;
    fresh.reserve(loop.size());
    for (const Edge& e : loop) {
      const int idx = static_cast<int>(tris_.size());
      tris_.push_back(DTri{{p, e.a, e.b}, {e.outer, -1, -1}, true});
      if (e.outer >= 0) {
        DTri& o = tris_[e.outer];
        for (int k = 0; k < 3; ++k) {
          const int oa = o.v[(k + 1) % 3], ob = o.v[(k + 2) % 3];
          if ((oa == e.b && ob == e.a) || (oa == e.a && ob == e.b)) o.adj[k] = idx;
        }
      }
      by_first[e.a] = idx;
      fresh.push_back(idx);
    }
    for (int idx : fresh) {
      DTri& t = tris_[idx];
      // edge opposite v[1]=a is (b, p): shared with triangle starting at b
      auto it = by_first.find(t.v[2]);
      if (it != by_first.end()) t.adj[1] = it->second;
      // edge opposite v[2]=b is (p, a): shared with the triangle ending at a
      for (int other : fresh) {
        if (tris_[other].v[2] == t.v[1]) {
          t.adj[2] = other;
          break;
        }
      }
    }
    last_ = fresh.empty() ? last_ : fresh.front();
  }

  const std::vector<Vec2>& pts_;
  std::vector<Vec2> all_;
  std::vector<DTri> tris_;
  int n_real_ = 0;
  int last_ = 0;
};

Eigen::Vector3d barycentric_raw(const Vec2& a, const Vec2& b, const Vec2& c,
                                const Vec2& p) {
  const double total = cross2(b - a, c - a);
  Eigen::Vector3d bar;
  bar[0] = cross2(b - p, c - p) / total;
  bar[1] = cross2(c - p, a - p) / total;
  bar[2] = cross2(a - p, b - p) / total;
  return bar;
}

// Signed "insideness" of p with respect to the boundary polygon: minimum
// over (counterclockwise) boundary edges of the left-of-edge cross product
// scaled to a distance. Negative means outside.
double polygon_inside_margin(const TriMesh& mesh, const Vec2& p) {
  double m = std::numeric_limits<double>::infinity();
  const int nb = static_cast<int>(mesh.boundary_loop.size());
  for (int i = 0; i < nb; ++i) {
    const Vec2& a = mesh.nodes[mesh.boundary_loop[i]];
    const Vec2& b = mesh.nodes[mesh.boundary_loop[(i + 1) % nb]];
    const Vec2 e = b - a;
    m = std::min(m, cross2(e, p - a) / e.norm());
  }
  return m;
}

Vec2 closest_boundary_point(const TriMesh& mesh, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  Vec2 q = p;
  const int nb = static_cast<int>(mesh.boundary_loop.size());
  for (int i = 0; i < nb; ++i) {
    const Vec2& a = mesh.nodes[mesh.boundary_loop[i]];
    const Vec2& b = mesh.nodes[mesh.boundary_loop[(i + 1) % nb]];
    const Vec2 c = segment_closest_point(p, a, b);
    const double d = (p - c).squaredNorm();
    if (d < best) {
      best = d;
      q = c;
    }
  }
  return q;
}

int grid_seed(const TriMesh& mesh, const Vec2& p) {
  const TriMesh::SeedGrid& g = mesh.grid;
  if (g.seed.empty()) return 0;
  const int ix = std::clamp(static_cast<int>((p.x() - g.x0) / g.cell), 0, g.nx - 1);
  const int iy = std::clamp(static_cast<int>((p.y() - g.y0) / g.cell), 0, g.ny - 1);
  const int s = g.seed[iy * g.nx + ix];
  return s >= 0 ? s : 0;
}

}  // namespace

std::vector<int> TriMesh::interior_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < n_nodes(); ++i)
    if (is_interior(i)) out.push_back(i);
  return out;
}

Vec2 TriMesh::element_centroid(int e) const {
  const auto& t = elements[e];
  return (nodes[t[0]] + nodes[t[1]] + nodes[t[2]]) / 3.0;
}

double TriMesh::element_longest_edge(int e) const {
  const auto& t = elements[e];
  return std::sqrt(std::max({dist2(nodes[t[0]], nodes[t[1]]),
                             dist2(nodes[t[1]], nodes[t[2]]),
                             dist2(nodes[t[2]], nodes[t[0]])}));
}

TriMesh finalize_mesh(std::vector<Vec2> nodes,
                      std::vector<std::array<int, 3>> elements,
                      std::vector<std::uint8_t> boundary_flags) {
  TriMesh mesh;
  mesh.nodes = std::move(nodes);
  mesh.elements = std::move(elements);
  mesh.node_on_boundary = std::move(boundary_flags);
  const int nn = mesh.n_nodes();
  const int ne = mesh.n_elements();
  if (static_cast<int>(mesh.node_on_boundary.size()) != nn)
    throw std::runtime_error("mesh: boundary flag count mismatch");

  // Orientation: flip elements to counterclockwise, reject zero areas.
  for (auto& t : mesh.elements) {
    const double a = signed_area(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
    if (a == 0.0) throw std::runtime_error("mesh: degenerate element");
    if (a < 0.0) std::swap(t[1], t[2]);
  }

  // Edge-based adjacency; each interior edge must appear exactly twice.
  mesh.neighbors.assign(ne, {-1, -1, -1});
  std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;
  for (int e = 0; e < ne; ++e) {
    const auto& t = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      const auto key = std::minmax(a, b);
      auto it = edge_owner.find(key);
      if (it == edge_owner.end()) {
        edge_owner[key] = {e, k};
      } else {
        auto [oe, ok] = it->second;
        if (oe < 0) throw std::runtime_error("mesh: edge shared by three elements");
        mesh.neighbors[e][k] = oe;
        mesh.neighbors[oe][ok] = e;
        it->second = {-1, -1};
      }
    }
  }

  // Boundary loop from the unmatched edges, chained into one cycle. Edges
  // are kept in element orientation so the loop runs counterclockwise.
  std::map<int, int> next_on_boundary;
  int boundary_edges = 0;
  for (int e = 0; e < ne; ++e) {
    const auto& t = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      if (mesh.neighbors[e][k] >= 0) continue;
      const int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      if (next_on_boundary.count(a))
        throw std::runtime_error("mesh: boundary is not a simple cycle");
      next_on_boundary[a] = b;
      ++boundary_edges;
    }
  }
  if (boundary_edges < 3) throw std::runtime_error("mesh: no boundary found");
  mesh.boundary_loop.clear();
  int start = next_on_boundary.begin()->first;
  int cur = start;
  do {
    mesh.boundary_loop.push_back(cur);
    auto it = next_on_boundary.find(cur);
    if (it == next_on_boundary.end())
      throw std::runtime_error("mesh: broken boundary cycle");
    cur = it->second;
  } while (cur != start && static_cast<int>(mesh.boundary_loop.size()) <= boundary_edges);
  if (static_cast<int>(mesh.boundary_loop.size()) != boundary_edges)
    throw std::runtime_error("mesh: boundary has more than one cycle");

  // Flags must match the loop exactly.
  std::vector<std::uint8_t> derived(nn, 0);
  for (int i : mesh.boundary_loop) derived[i] = 1;
  for (int i = 0; i < nn; ++i) {
    if (derived[i] != (mesh.node_on_boundary[i] ? 1 : 0))
      throw std::runtime_error("mesh: boundary flags disagree with topology");
  }

  // Node stars.
  mesh.node_elements.assign(nn, {});
  for (int e = 0; e < ne; ++e)
    for (int k = 0; k < 3; ++k) mesh.node_elements[mesh.elements[e][k]].push_back(e);

  // Size metrics.
  double hmax = 0.0, hmin = std::numeric_limits<double>::infinity(), reg = 0.0;
  for (int e = 0; e < ne; ++e) {
    const auto& t = mesh.elements[e];
    const Vec2 &a = mesh.nodes[t[0]], &b = mesh.nodes[t[1]], &c = mesh.nodes[t[2]];
    const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
    const double area = signed_area(a, b, c);
    const double diam = std::max({la, lb, lc});
    hmax = std::max(hmax, diam);
    hmin = std::min(hmin, diam);
    const double circum = la * lb * lc / (4.0 * area);
    const double inr = 2.0 * area / (la + lb + lc);
    reg = std::max(reg, circum / inr);
  }
  mesh.h = hmax;
  mesh.shape_regularity = reg;
  mesh.quasi_uniformity = hmin / hmax;

  // Seed grid for point location, roughly one element per cell.
  Vec2 lo = mesh.nodes[0], hi = mesh.nodes[0];
  for (const Vec2& p : mesh.nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  TriMesh::SeedGrid g;
  g.cell = std::max(mesh.h, 1e-12);
  g.x0 = lo.x();
  g.y0 = lo.y();
  g.nx = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / g.cell)));
  g.ny = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / g.cell)));
  g.seed.assign(static_cast<size_t>(g.nx) * g.ny, -1);
  for (int e = 0; e < ne; ++e) {
    const Vec2 c = mesh.element_centroid(e);
    const int ix = std::clamp(static_cast<int>((c.x() - g.x0) / g.cell), 0, g.nx - 1);
    const int iy = std::clamp(static_cast<int>((c.y() - g.y0) / g.cell), 0, g.ny - 1);
    int& s = g.seed[iy * g.nx + ix];
    if (s < 0) s = e;
  }
  // Fill empty cells from a neighbor sweep so every cell has some seed.
  for (int pass = 0; pass < g.nx + g.ny; ++pass) {
    bool changed = false;
    for (int iy = 0; iy < g.ny; ++iy) {
      for (int ix = 0; ix < g.nx; ++ix) {
        int& s = g.seed[iy * g.nx + ix];
        if (s >= 0) continue;
        for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
          const int jx = ix + dx, jy = iy + dy;
          if (jx < 0 || jy < 0 || jx >= g.nx || jy >= g.ny) continue;
          const int t = g.seed[jy * g.nx + jx];
          if (t >= 0) {
            s = t;
            changed = true;
            break;
          }
        }
      }
    }
    if (!changed) break;
  }
  mesh.grid = std::move(g);
  return mesh;
}

TriMesh generate_mesh(const DomainSpec& domain, double h_target, std::uint64_t seed) {
  if (!(h_target > 0.0)) throw std::invalid_argument("h_target must be positive");
  const double perim = domain.perimeter();
  const int nb = static_cast<int>(std::ceil(perim / h_target));
  if (nb < 8)
    throw std::invalid_argument(
        "h_target too large: fewer than 8 boundary nodes would be placed");

  std::vector<Vec2> pts = domain.boundary_nodes(nb);
  const int n_boundary = static_cast<int>(pts.size());

  // Temporary mesh-free boundary polygon for distance culling.
  auto polygon_distance = [&](const Vec2& p) {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_boundary; ++i)
      d = std::min(d, segment_distance(p, pts[i], pts[(i + 1) % n_boundary]));
    return d;
  };
  auto polygon_inside = [&](const Vec2& p) {
    for (int i = 0; i < n_boundary; ++i) {
      const Vec2& a = pts[i];
      const Vec2& b = pts[(i + 1) % n_boundary];
      if (cross2(b - a, p - a) <= 0.0) return false;
    }
    return true;
  };

  // Jittered triangular lattice clipped to the domain with a safety strip
  // along the boundary so boundary chords stay mesh edges. The spacing is
  // chosen against the strip worst case: a culled row next to the margin
  // leaves a gap of (margin + row pitch) ~ 1.05 h_target, and with the
  // horizontal half-step and jitter the longest edge stays under 1.5 h_target.
  const double s = 0.80 * h_target;
  const double row = s * std::sqrt(3.0) / 2.0;
  const double margin = 0.45 * s;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jit(-0.10 * s, 0.10 * s);
  Vec2 lo = pts[0], hi = pts[0];
  for (const Vec2& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  int j = 0;
  for (double y = lo.y() + 0.4 * row; y < hi.y(); y += row, ++j) {
    const double offset = (j % 2 == 0) ? 0.0 : 0.5 * s;
    for (double x = lo.x() + offset; x < hi.x(); x += s) {
      const Vec2 p(x + jit(rng), y + jit(rng));
      if (!polygon_inside(p)) continue;
      if (polygon_distance(p) < margin) continue;
      pts.push_back(p);
    }
  }

  Delaunay del(pts);
  std::vector<std::uint8_t> flags(pts.size(), 0);
  for (int i = 0; i < n_boundary; ++i) flags[i] = 1;
  TriMesh mesh = finalize_mesh(std::move(pts), del.real_triangles(), std::move(flags));
  validate_mesh(mesh, &domain);
  if (mesh.h > 1.5 * h_target) {
    for (int e = 0; e < mesh.n_elements(); ++e) {
      if (mesh.element_longest_edge(e) < mesh.h * 0.9999) continue;
      const auto& t = mesh.elements[e];
      fprintf(stderr, "DBG long elem %d: ", e);
      for (int k = 0; k < 3; ++k)
        fprintf(stderr, "(%.4f,%.4f b%d d%.4f) ", mesh.nodes[t[k]].x(),
                mesh.nodes[t[k]].y(), (int)mesh.node_on_boundary[t[k]],
                boundary_distance(mesh, mesh.nodes[t[k]]));
      fprintf(stderr, " h=%.4f ht=%.4f\n", mesh.h, h_target);
    }
    throw std::runtime_error("generate_mesh: produced h exceeds 1.5 * h_target");
  }
  return mesh;
}

TriMesh make_structured_square_mesh(double half_width, int cells_per_side) {
  if (half_width <= 0.0 || cells_per_side < 2)
    throw std::invalid_argument("bad structured mesh parameters");
  const int n = cells_per_side;
  const double step = 2.0 * half_width / n;
  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<size_t>(n + 1) * (n + 1));
  std::vector<std::uint8_t> flags;
  for (int jy = 0; jy <= n; ++jy)
    for (int ix = 0; ix <= n; ++ix) {
      nodes.emplace_back(-half_width + ix * step, -half_width + jy * step);
      flags.push_back(ix == 0 || jy == 0 || ix == n || jy == n);
    }
  auto id = [n](int ix, int jy) { return jy * (n + 1) + ix; };
  std::vector<std::array<int, 3>> elems;
  for (int jy = 0; jy < n; ++jy)
    for (int ix = 0; ix < n; ++ix) {
      const int a = id(ix, jy), b = id(ix + 1, jy), c = id(ix + 1, jy + 1),
                d = id(ix, jy + 1);
      if ((ix + jy) % 2 == 0) {  // diagonal a-c
        elems.push_back({a, b, c});
        elems.push_back({a, c, d});
      } else {  // diagonal b-d
        elems.push_back({a, b, d});
        elems.push_back({b, c, d});
      }
    }
  return finalize_mesh(std::move(nodes), std::move(elems), std::move(flags));
}

PointLocation locate_point(const TriMesh& mesh, const Vec2& p, int hint_element) {
  const auto bary_of = [&](int e) {
    const auto& t = mesh.elements[e];
    return barycentric_raw(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]], p);
  };

  int cur = (hint_element >= 0 && hint_element < mesh.n_elements())
                ? hint_element
                : grid_seed(mesh, p);
  const int max_steps = 2 * mesh.n_elements() + 16;
  for (int step = 0; step < max_steps; ++step) {
    const Eigen::Vector3d bar = bary_of(cur);
    int k;
    const double mn = bar.minCoeff(&k);
    if (mn >= -1e-12) return PointLocation{cur, bar};
    const int nxt = mesh.neighbors[cur][k];
    if (nxt < 0) break;  // walked off through the hull
    cur = nxt;
  }

  // Brute-force: the element with the least barycentric violation.
  int best_e = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_bar = Eigen::Vector3d::Zero();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Eigen::Vector3d bar = bary_of(e);
    const double mn = bar.minCoeff();
    if (mn > best_min) {
      best_min = mn;
      best_e = e;
      best_bar = bar;
    }
  }
  if (best_min >= -1e-12) return PointLocation{best_e, best_bar};

  const double outside = -polygon_inside_margin(mesh, p);
  if (outside > 1e-10)
    throw std::domain_error("locate_point: point outside the computational domain");

  // Snap onto the boundary polygon and relocate (clamping rounding noise).
  const Vec2 q = closest_boundary_point(mesh, p);
  best_min = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& t = mesh.elements[e];
    const Eigen::Vector3d bar =
        barycentric_raw(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]], q);
    const double mn = bar.minCoeff();
    if (mn > best_min) {
      best_min = mn;
      best_e = e;
      best_bar = bar;
    }
  }
  Eigen::Vector3d bar = best_bar.cwiseMax(0.0);
  bar /= bar.sum();
  return PointLocation{best_e, bar};
}

double boundary_distance(const TriMesh& mesh, const Vec2& p) {
  if (polygon_inside_margin(mesh, p) < -1e-10)
    throw std::domain_error("boundary_distance: point outside the computational domain");
  double d = std::numeric_limits<double>::infinity();
  const int nb = static_cast<int>(mesh.boundary_loop.size());
  for (int i = 0; i < nb; ++i) {
    const Vec2& a = mesh.nodes[mesh.boundary_loop[i]];
    const Vec2& b = mesh.nodes[mesh.boundary_loop[(i + 1) % nb]];
    d = std::min(d, segment_distance(p, a, b));
  }
  return d;
}

DeltaInteriorSets classify_delta_interior(const TriMesh& mesh, double delta) {
  if (delta < 0.0) throw std::invalid_argument("delta must be nonnegative");
  DeltaInteriorSets out;
  const int nn = mesh.n_nodes();
  std::vector<double> dist(nn);
  for (int i = 0; i < nn; ++i)
    dist[i] = mesh.node_on_boundary[i] ? 0.0 : boundary_distance(mesh, mesh.nodes[i]);

  // dist is concave on a convex polygon, so an element lies in the
  // delta-interior iff all three vertices do.
  const int ne = mesh.n_elements();
  out.element_in_interior.assign(ne, 0);
  for (int e = 0; e < ne; ++e) {
    const auto& t = mesh.elements[e];
    out.element_in_interior[e] =
        dist[t[0]] >= delta && dist[t[1]] >= delta && dist[t[2]] >= delta;
  }
  for (int i = 0; i < nn; ++i) {
    if (!mesh.is_interior(i)) continue;
    bool inside = true;
    for (int e : mesh.node_elements[i]) inside = inside && out.element_in_interior[e];
    if (inside)
      out.delta_interior.push_back(i);
    else
      out.boundary_layer.push_back(i);
  }
  return out;
}

void validate_mesh(const TriMesh& mesh, const DomainSpec* domain) {
  const int nn = mesh.n_nodes();
  const int ne = mesh.n_elements();
  if (nn < 3 || ne < 1) throw std::runtime_error("mesh: empty");

  for (int e = 0; e < ne; ++e) {
    const auto& t = mesh.elements[e];
    for (int k = 0; k < 3; ++k)
      if (t[k] < 0 || t[k] >= nn) throw std::runtime_error("mesh: vertex id out of range");
    const double a = signed_area(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
    if (!(a > 0.0)) throw std::runtime_error("mesh: non-positive element area");
  }

  // Conformity: rebuild the edge multiset and compare with adjacency.
  std::map<std::pair<int, int>, int> edge_count;
  for (int e = 0; e < ne; ++e) {
    const auto& t = mesh.elements[e];
    for (int k = 0; k < 3; ++k)
      edge_count[std::minmax(t[(k + 1) % 3], t[(k + 2) % 3])]++;
  }
  for (const auto& [edge, count] : edge_count) {
    if (count > 2) throw std::runtime_error("mesh: non-conforming edge");
  }

  // Convexity of the boundary polygon: all turns counterclockwise
  // (collinear allowed, for polygonal domains with subdivided edges).
  const int nbl = static_cast<int>(mesh.boundary_loop.size());
  if (nbl < 3) throw std::runtime_error("mesh: degenerate boundary loop");
  for (int i = 0; i < nbl; ++i) {
    const Vec2& a = mesh.nodes[mesh.boundary_loop[i]];
    const Vec2& b = mesh.nodes[mesh.boundary_loop[(i + 1) % nbl]];
    const Vec2& c = mesh.nodes[mesh.boundary_loop[(i + 2) % nbl]];
    const Vec2 e1 = b - a, e2 = c - b;
    if (cross2(e1, e2) < -1e-12 * e1.norm() * e2.norm())
      throw std::runtime_error("mesh: boundary polygon is not convex");
  }

  if (domain != nullptr) {
    for (int i = 0; i < nn; ++i) {
      if (!mesh.node_on_boundary[i]) continue;
      if (domain->distance_to_boundary(mesh.nodes[i]) > 1e-12)
        throw std::runtime_error("mesh: boundary node off the analytic boundary");
    }
  }

  if (!(mesh.h > 0.0) || !(mesh.quasi_uniformity > 0.0))
    throw std::runtime_error("mesh: size metrics not set");
}

void write_mesh(const TriMesh& mesh, std::ostream& out) {
  out << "MESH2D " << mesh.n_nodes() << ' ' << mesh.n_elements() << '\n';
  out.precision(17);
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    out << mesh.nodes[i].x() << ' ' << mesh.nodes[i].y() << ' '
        << (mesh.node_on_boundary[i] ? 1 : 0) << '\n';
  }
  for (const auto& t : mesh.elements) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_mesh(const TriMesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open mesh file for writing: " + path);
  write_mesh(mesh, f);
}

TriMesh read_mesh(std::istream& in) {
  std::string magic;
  int nn = 0, ne = 0;
  if (!(in >> magic >> nn >> ne) || magic != "MESH2D")
    throw std::runtime_error("mesh file: bad header");
  if (nn < 3 || ne < 1) throw std::runtime_error("mesh file: bad counts");
  std::vector<Vec2> nodes(nn);
  std::vector<std::uint8_t> flags(nn);
  for (int i = 0; i < nn; ++i) {
    double x, y;
    int f;
    if (!(in >> x >> y >> f)) throw std::runtime_error("mesh file: truncated node list");
    nodes[i] = Vec2(x, y);
    flags[i] = f ? 1 : 0;
  }
  std::vector<std::array<int, 3>> elems(ne);
  for (int e = 0; e < ne; ++e) {
    if (!(in >> elems[e][0] >> elems[e][1] >> elems[e][2]))
      throw std::runtime_error("mesh file: truncated element list");
  }
  TriMesh mesh = finalize_mesh(std::move(nodes), std::move(elems), std::move(flags));
  validate_mesh(mesh);
  return mesh;
}

TriMesh read_mesh(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open mesh file: " + path);
  return read_mesh(f);
}

}  // namespace twoscale
