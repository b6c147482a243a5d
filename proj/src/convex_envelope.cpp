#include "twoscale/convex_envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace twoscale {

namespace {

using Vec3 = Eigen::Vector3d;

// ---------------------------------------------------------------------------
// Incremental 3D convex hull with conflict lists (randomized order).
// Only correctness at the ~1e-12 scale of lifted PWL data is needed, so
// plane-side tests carry a relative guard; points within the guard count as
// non-visible, which leaves exactly-coplanar patches triangulated and
// harmless for envelope extraction.
// ---------------------------------------------------------------------------

struct HullFacet {
  std::array<int, 3> v;
  std::array<int, 3> adj;  // across edge opposite v[k]
  Vec3 normal;             // outward, not normalized
  double offset = 0.0;     // normal . x <= offset on the hull
  bool alive = true;
  std::vector<int> conflicts;
};

class Hull3D {
 public:
  explicit Hull3D(const std::vector<Vec3>& pts, double eps) : pts_(pts), eps_(eps) {
    build();
  }

  bool degenerate = false;      // all points coplanar
  Vec3 plane_normal;            // for the degenerate case
  double plane_offset = 0.0;

  const std::vector<HullFacet>& facets() const { return facets_; }

 private:
  double side(const HullFacet& f, int p) const {
    return f.normal.dot(pts_[p]) - f.offset;
  }
  bool visible(const HullFacet& f, int p) const {
    return side(f, p) > eps_ * f.normal.norm();
  }

  void set_plane(HullFacet& f) {
    const Vec3& a = pts_[f.v[0]];
    f.normal = (pts_[f.v[1]] - a).cross(pts_[f.v[2]] - a);
    f.offset = f.normal.dot(a);
  }

  void build() {
    const int n = static_cast<int>(pts_.size());
    if (n < 4) {
      degenerate = true;
    }
    // Spanning simplex: extreme pair, then max-area third, max-volume fourth.
    int i0 = 0, i1 = 0;
    for (int i = 1; i < n; ++i) {
      if (pts_[i].x() < pts_[i0].x()) i0 = i;
      if (pts_[i].x() > pts_[i1].x()) i1 = i;
    }
    if (i0 == i1) i1 = (i0 + 1) % n;
    int i2 = -1;
    double best_area = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = (pts_[i1] - pts_[i0]).cross(pts_[i] - pts_[i0]).norm();
      if (a > best_area) {
        best_area = a;
        i2 = i;
      }
    }
    if (i2 < 0) throw std::runtime_error("convex envelope: point cloud is collinear");
    const Vec3 nrm = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]);
    int i3 = -1;
    double best_vol = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = std::abs(nrm.dot(pts_[i] - pts_[i0]));
      if (v > best_vol) {
        best_vol = v;
        i3 = i;
      }
    }
    if (i3 < 0 || best_vol <= eps_ * nrm.norm()) {
      degenerate = true;
      plane_normal = nrm;
      plane_offset = nrm.dot(pts_[i0]);
      return;
    }

    interior_ = 0.25 * (pts_[i0] + pts_[i1] + pts_[i2] + pts_[i3]);
    auto add_facet = [&](int a, int b, int c) {
      HullFacet f;
      f.v = {a, b, c};
      f.adj = {-1, -1, -1};
      set_plane(f);
      if (f.normal.dot(interior_) - f.offset > 0.0) {
        std::swap(f.v[1], f.v[2]);
        set_plane(f);
      }
      facets_.push_back(std::move(f));
      return static_cast<int>(facets_.size()) - 1;
    };
    add_facet(i0, i1, i2);
    add_facet(i0, i1, i3);
    add_facet(i0, i2, i3);
    add_facet(i1, i2, i3);
    link_all({0, 1, 2, 3});

    // Conflicts of the initial simplex.
    point_conflicts_.assign(n, {});
    std::vector<int> rest;
    rest.reserve(n);
    for (int i = 0; i < n; ++i) {
      if (i == i0 || i == i1 || i == i2 || i == i3) continue;
      rest.push_back(i);
    }
    std::mt19937_64 rng(0x6d6f6e6765u);
    std::shuffle(rest.begin(), rest.end(), rng);
    for (int p : rest) {
      for (int f = 0; f < 4; ++f) {
        if (visible(facets_[f], p)) {
          facets_[f].conflicts.push_back(p);
          point_conflicts_[p].push_back(f);
        }
      }
    }
    for (int p : rest) insert(p);
  }

  // Rebuild adjacency among the given facets by matching edges.
  void link_all(const std::vector<int>& ids) {
    for (int fi : ids) {
      HullFacet& f = facets_[fi];
      for (int k = 0; k < 3; ++k) {
        if (f.adj[k] >= 0) continue;
        const int a = f.v[(k + 1) % 3], b = f.v[(k + 2) % 3];
        for (int gi : ids) {
          if (gi == fi) continue;
          HullFacet& g = facets_[gi];
          for (int l = 0; l < 3; ++l) {
            const int c = g.v[(l + 1) % 3], d = g.v[(l + 2) % 3];
            if ((a == c && b == d) || (a == d && b == c)) {
              f.adj[k] = gi;
              g.adj[l] = fi;
            }
          }
        }
      }
    }
  }

  void insert(int p) {
    // Any alive conflicting facet seeds the visible region.
    int seed = -1;
    for (int f : point_conflicts_[p]) {
      if (facets_[f].alive && visible(facets_[f], p)) {
        seed = f;
        break;
      }
    }
    if (seed < 0) return;  // inside (or on) the current hull

    std::vector<int> vis{seed};
    std::vector<int> stack{seed};
    visited_mark_.assign(facets_.size(), 0);
    visited_mark_[seed] = 1;
    while (!stack.empty()) {
      const int fi = stack.back();
      stack.pop_back();
      for (int k = 0; k < 3; ++k) {
        const int g = facets_[fi].adj[k];
        if (g < 0 || visited_mark_[g]) continue;
        visited_mark_[g] = 1;
        if (facets_[g].alive && visible(facets_[g], p)) {
          vis.push_back(g);
          stack.push_back(g);
        }
      }
    }

    struct HorizonEdge {
      int a, b, outer, outer_slot;
    };
    std::vector<HorizonEdge> horizon;
    for (int fi : vis) {
      const HullFacet& f = facets_[fi];
      for (int k = 0; k < 3; ++k) {
        const int g = f.adj[k];
        if (g >= 0 && facets_[g].alive && visible(facets_[g], p)) continue;
        int slot = -1;
        if (g >= 0) {
          for (int l = 0; l < 3; ++l)
            if (facets_[g].adj[l] == fi) slot = l;
        }
        horizon.push_back({f.v[(k + 1) % 3], f.v[(k + 2) % 3], g, slot});
      }
    }

    // Collect orphaned conflict points before killing the visible facets.
    std::vector<int> orphans;
    for (int fi : vis) {
      for (int q : facets_[fi].conflicts)
        if (q != p) orphans.push_back(q);
      facets_[fi].conflicts.clear();
      facets_[fi].alive = false;
    }
    std::sort(orphans.begin(), orphans.end());
    orphans.erase(std::unique(orphans.begin(), orphans.end()), orphans.end());

    // New cone of facets (a, b, p) over the horizon loop.
    std::vector<int> fresh;
    fresh.reserve(horizon.size());
    for (const HorizonEdge& e : horizon) {
      HullFacet f;
      f.v = {e.a, e.b, p};
      f.adj = {-1, -1, e.outer};
      set_plane(f);
      if (f.normal.dot(interior_) - f.offset > 0.0) {
        std::swap(f.v[0], f.v[1]);
        set_plane(f);
        f.adj = {-1, -1, e.outer};
      }
      const int idx = static_cast<int>(facets_.size());
      facets_.push_back(std::move(f));
      if (e.outer >= 0 && e.outer_slot >= 0) facets_[e.outer].adj[e.outer_slot] = idx;
      fresh.push_back(idx);
    }
    // Link the cone facets along their (*, p) edges.
    for (int fi : fresh) {
      HullFacet& f = facets_[fi];
      for (int k = 0; k < 2; ++k) {
        if (f.adj[k] >= 0) continue;
        const int a = f.v[(k + 1) % 3], b = f.v[(k + 2) % 3];
        for (int gi : fresh) {
          if (gi == fi) continue;
          HullFacet& g = facets_[gi];
          for (int l = 0; l < 3; ++l) {
            const int c = g.v[(l + 1) % 3], d = g.v[(l + 2) % 3];
            if ((a == c && b == d) || (a == d && b == c)) {
              f.adj[k] = gi;
              g.adj[l] = fi;
            }
          }
        }
      }
    }

    // Redistribute conflicts of the deleted facets.
    for (int q : orphans) {
      for (int fi : fresh) {
        if (visible(facets_[fi], q)) {
          facets_[fi].conflicts.push_back(q);
          point_conflicts_[q].push_back(fi);
        }
      }
    }
  }

  const std::vector<Vec3>& pts_;
  double eps_;
  Vec3 interior_ = Vec3::Zero();
  std::vector<HullFacet> facets_;
  std::vector<std::vector<int>> point_conflicts_;
  std::vector<char> visited_mark_;
};

}  // namespace

int ConvexEnvelopeResult::contact_index(int node) const {
  auto it = std::lower_bound(contact.begin(), contact.end(), node);
  if (it == contact.end() || *it != node) return -1;
  return static_cast<int>(it - contact.begin());
}

double polygon_area(const std::vector<Vec2>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) return 0.0;
  double a = 0.0;
  for (int i = 0; i < n; ++i) a += cross2(pts[i], pts[(i + 1) % n]);
  return 0.5 * std::abs(a);
}

std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a == b; }),
            pts.end());
  const int n = static_cast<int>(pts.size());
  if (n <= 2) return pts;
  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lo = k + 1; i >= 0; --i) {  // upper chain
    while (k >= lo && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

ConvexEnvelopeResult convex_envelope(const TriMesh& mesh, const NodalField& field) {
  if (field.mesh != &mesh || field.values.size() != mesh.n_nodes())
    throw std::invalid_argument("convex_envelope: field does not match mesh");
  const int n = mesh.n_nodes();

  std::vector<Vec3> lifted(n);
  double extent = 0.0;
  for (int i = 0; i < n; ++i) {
    lifted[i] = Vec3(mesh.nodes[i].x(), mesh.nodes[i].y(), field.values[i]);
    extent = std::max(extent, lifted[i].cwiseAbs().maxCoeff());
  }
  extent = std::max(extent, 1.0);
  const double eps = 1e-13 * extent;

  ConvexEnvelopeResult res;
  res.envelope.resize(n);
  res.in_contact.assign(n, 0);

  // Plane coefficients (gx, gy, c) of the downward hull facets; the
  // envelope is their pointwise max. Sliver facets (tiny projected area)
  // carry ill-conditioned gradients and are skipped.
  struct FacetPlane {
    Vec2 grad;
    double c;
    std::array<int, 3> v;
  };
  std::vector<FacetPlane> planes;

  Hull3D hull(lifted, eps);
  if (hull.degenerate) {
    // All lifted points coplanar: the envelope is that affine function.
    Vec3 nrm = hull.plane_normal;
    if (std::abs(nrm.z()) < eps)
      throw std::runtime_error("convex_envelope: degenerate vertical point cloud");
    const Vec2 grad(-nrm.x() / nrm.z(), -nrm.y() / nrm.z());
    const double c = hull.plane_offset / nrm.z();
    for (int i = 0; i < n; ++i)
      res.envelope[i] = grad.dot(mesh.nodes[i]) + c;
    for (int i = 0; i < n; ++i) {
      if (!mesh.is_interior(i)) continue;
      res.in_contact[i] = 1;
      res.contact.push_back(i);
      res.subdifferentials.push_back({i, {grad}, 0.0});
    }
    return res;
  }

  const double area_eps = 1e-13 * extent * extent;
  std::vector<std::vector<int>> incident(n);  // node -> plane indices
  for (const HullFacet& f : hull.facets()) {
    if (!f.alive) continue;
    if (!(f.normal.z() < 0.0)) continue;             // keep the lower hull
    if (std::abs(f.normal.z()) <= area_eps) continue;  // sliver
    FacetPlane fp;
    fp.grad = Vec2(-f.normal.x() / f.normal.z(), -f.normal.y() / f.normal.z());
    fp.c = f.offset / f.normal.z();
    fp.v = f.v;
    const int id = static_cast<int>(planes.size());
    planes.push_back(fp);
    for (int v : f.v) incident[v].push_back(id);
  }
  if (planes.empty()) throw std::runtime_error("convex_envelope: no lower facets");

  std::vector<int> best_plane(n, 0);
  for (int i = 0; i < n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (int pi = 0; pi < static_cast<int>(planes.size()); ++pi) {
      const double v = planes[pi].grad.dot(mesh.nodes[i]) + planes[pi].c;
      if (v > best) {
        best = v;
        best_plane[i] = pi;
      }
    }
    res.envelope[i] = std::min(best, field.values[i]);
  }

  for (int i = 0; i < n; ++i) {
    if (!mesh.is_interior(i)) continue;
    if (field.values[i] - res.envelope[i] > 1e-10) continue;
    res.in_contact[i] = 1;
    res.contact.push_back(i);

    std::vector<Vec2> grads;
    for (int pi : incident[i]) grads.push_back(planes[pi].grad);
    if (grads.empty()) grads.push_back(planes[best_plane[i]].grad);
    // Merge numerically coincident facet gradients before hulling.
    std::sort(grads.begin(), grads.end(), [](const Vec2& a, const Vec2& b) {
      return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    grads.erase(std::unique(grads.begin(), grads.end(),
                            [](const Vec2& a, const Vec2& b) {
                              return (a - b).norm() <= 1e-9;
                            }),
                grads.end());
    SubdifferentialPolygon poly;
    poly.node = i;
    poly.gradients = convex_hull_2d(std::move(grads));
    poly.area = polygon_area(poly.gradients);
    res.subdifferentials.push_back(std::move(poly));
  }
  return res;
}

double subdifferential_measure(const ConvexEnvelopeResult& result, int node) {
  const int idx = result.contact_index(node);
  if (idx < 0)
    throw std::logic_error("subdifferential_measure: node is not in the contact set");
  return result.subdifferentials[idx].area;
}

HyperRectangleCheck check_hyper_rectangle_bound(const OperatorContext& ctx,
                                                const ConvexEnvelopeResult& result,
                                                int node) {
  const int idx = result.contact_index(node);
  if (idx < 0)
    throw std::logic_error("hyper_rectangle_bound: node is not in the contact set");
  NodalField envelope_field(*ctx.mesh, result.envelope);
  const double dh = ctx.delta_hat(node);
  HyperRectangleCheck out;
  out.lhs_area = result.subdifferentials[idx].area;
  out.rhs_bound = std::pow(dh, ctx.dim) *
                  std::max(product_form_T(ctx, envelope_field, node), 0.0);
  return out;
}

AlexandroffCheck alexandroff_check(const TriMesh& mesh, const NodalField& field) {
  for (int i : mesh.boundary_loop) {
    if (field.values[i] < -1e-12)
      throw std::logic_error("alexandroff_check: field negative on the boundary");
  }
  AlexandroffCheck out;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    if (!mesh.is_interior(i)) continue;
    out.lhs = std::max(out.lhs, -std::min(field.values[i], 0.0));
  }
  const ConvexEnvelopeResult env = convex_envelope(mesh, field);
  for (const auto& poly : env.subdifferentials) out.rhs_sum += poly.area;
  if (out.lhs == 0.0)
    out.ratio = 0.0;
  else if (out.rhs_sum <= 0.0)
    out.ratio = std::numeric_limits<double>::infinity();
  else
    out.ratio = out.lhs / std::sqrt(out.rhs_sum);
  return out;
}

std::vector<ContactSddViolation> contact_second_difference_check(
    const OperatorContext& ctx, const NodalField& field,
    const ConvexEnvelopeResult& result) {
  NodalField envelope_field(*ctx.mesh, result.envelope);
  std::vector<ContactSddViolation> bad;
  for (int node : result.contact) {
    for (int d = 0; d < ctx.stencil.n_dirs; ++d) {
      const double se = second_difference(envelope_field, ctx.stencil, node, d);
      const double sf = second_difference(field, ctx.stencil, node, d);
      if (se > sf + 1e-9) bad.push_back({node, d, se, sf});
    }
  }
  return bad;
}

}  // namespace twoscale
