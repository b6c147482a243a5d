#pragma once

#include "twoscale/geometry.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace twoscale {

/// Element id plus barycentric coordinates of a located point.
struct PointLocation {
  int element = -1;
  Eigen::Vector3d barycentric = Eigen::Vector3d::Zero();
};

/// Conforming triangulation of a convex domain. Boundary nodes lie on the
/// analytic boundary; the computational domain is the union of elements,
/// a convex polygon inscribed in the domain. Immutable after construction:
/// all queries are const and safe to call concurrently.
struct TriMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> elements;  // counterclockwise vertex ids
  std::vector<std::uint8_t> node_on_boundary;

  // Derived connectivity, built by finalize_mesh.
  std::vector<std::array<int, 3>> neighbors;  // across edge opposite vertex k; -1 on boundary
  std::vector<int> boundary_loop;             // counterclockwise boundary node ids
  std::vector<std::vector<int>> node_elements;

  double h = 0.0;                 // max element diameter
  double shape_regularity = 0.0;  // max circumradius / inradius
  double quasi_uniformity = 0.0;  // min element diameter / h

  // Uniform grid of seed elements for point location.
  struct SeedGrid {
    double x0 = 0, y0 = 0, cell = 1;
    int nx = 0, ny = 0;
    std::vector<int> seed;
  };
  SeedGrid grid;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  bool is_interior(int node) const { return node_on_boundary[node] == 0; }
  std::vector<int> interior_nodes() const;

  Vec2 element_centroid(int e) const;
  double element_longest_edge(int e) const;
};

/// Shape-regular quasi-uniform triangulation with boundary nodes equispaced
/// in arc length on the analytic boundary and a jittered interior lattice.
/// Throws std::invalid_argument when h_target is non-positive or so large
/// that fewer than 8 boundary nodes would be placed.
TriMesh generate_mesh(const DomainSpec& domain, double h_target,
                      std::uint64_t seed = 20240811u);

/// Structured lattice mesh of the square [-half_width, half_width]^2 with
/// alternating cell diagonals, so lattice points of even parity (the origin
/// included when cells_per_side is even) carry a symmetric 8-triangle star.
/// Used for translation-invariant patch experiments.
TriMesh make_structured_square_mesh(double half_width, int cells_per_side);

/// Builds derived connectivity (adjacency, boundary loop, metrics, seed
/// grid) and verifies conformity. The mesh generator and the file reader
/// both funnel through here.
TriMesh finalize_mesh(std::vector<Vec2> nodes,
                      std::vector<std::array<int, 3>> elements,
                      std::vector<std::uint8_t> boundary_flags);

/// Walks from the hint element (seed grid when absent) to the element
/// containing p. Points outside the computational domain by more than
/// 1e-10 raise std::domain_error; closer points are snapped to the
/// boundary polygon first.
PointLocation locate_point(const TriMesh& mesh, const Vec2& p, int hint_element = -1);

/// Exact Euclidean distance from p to the boundary polygon (min over
/// boundary segments). p must lie in the computational domain.
double boundary_distance(const TriMesh& mesh, const Vec2& p);

/// Interior nodes split into the delta-interior region (every element of
/// the node's star lies at distance >= delta from the boundary polygon)
/// and the complementary boundary layer.
struct DeltaInteriorSets {
  std::vector<int> delta_interior;
  std::vector<int> boundary_layer;
  std::vector<std::uint8_t> element_in_interior;  // per element
};
DeltaInteriorSets classify_delta_interior(const TriMesh& mesh, double delta);

/// Checks all structural invariants; throws std::runtime_error with a
/// description on the first violation. When the analytic domain is given,
/// also checks boundary nodes sit on the curve within 1e-12.
void validate_mesh(const TriMesh& mesh, const DomainSpec* domain = nullptr);

/// Line-oriented text format:
///   MESH2D <n_nodes> <n_elems>
///   x y boundary_flag        (per node)
///   i j k                    (per element, 0-based)
void write_mesh(const TriMesh& mesh, std::ostream& out);
void write_mesh(const TriMesh& mesh, const std::string& path);
TriMesh read_mesh(std::istream& in);
TriMesh read_mesh(const std::string& path);

}  // namespace twoscale
