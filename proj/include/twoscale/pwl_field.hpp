#pragma once

#include "twoscale/directions.hpp"
#include "twoscale/mesh.hpp"

#include <functional>

namespace twoscale {

/// Continuous piecewise linear function given by one value per mesh node.
struct NodalField {
  const TriMesh* mesh = nullptr;
  Eigen::VectorXd values;

  NodalField() = default;
  explicit NodalField(const TriMesh& m)
      : mesh(&m), values(Eigen::VectorXd::Zero(m.n_nodes())) {}
  NodalField(const TriMesh& m, Eigen::VectorXd v) : mesh(&m), values(std::move(v)) {}
};

/// Nodal interpolant: values are u(x_i) exactly.
NodalField interpolate(const TriMesh& mesh,
                       const std::function<double(const Vec2&)>& u);

/// Barycentric evaluation on the containing element.
double evaluate(const NodalField& field, const Vec2& p, int hint_element = -1);

/// Evaluation through a cached location (hot path).
inline double evaluate(const NodalField& field, const PointLocation& loc) {
  const auto& t = field.mesh->elements[loc.element];
  return loc.barycentric[0] * field.values[t[0]] +
         loc.barycentric[1] * field.values[t[1]] +
         loc.barycentric[2] * field.values[t[2]];
}

/// Cached evaluation data for the centered second differences
///   (w(x_i + d v_j) - 2 w(x_i) + w(x_i - d v_j)) / d^2,  d = delta_hat(i),
/// where delta_hat(i) = min(delta, dist(x_i, boundary polygon)) truncates
/// the coarse scale so both endpoints stay inside the computational domain.
struct SecondDiffStencil {
  double delta = 0.0;
  int n_dirs = 0;
  std::vector<int> interior;      // interior node ids, ascending
  std::vector<int> row_of_node;   // node id -> row, -1 for boundary nodes
  std::vector<double> delta_hat;  // per row
  std::vector<PointLocation> plus, minus;  // row-major [row * n_dirs + dir]

  int n_rows() const { return static_cast<int>(interior.size()); }
  const PointLocation& loc_plus(int row, int dir) const {
    return plus[static_cast<size_t>(row) * n_dirs + dir];
  }
  const PointLocation& loc_minus(int row, int dir) const {
    return minus[static_cast<size_t>(row) * n_dirs + dir];
  }
};

SecondDiffStencil build_stencils(const TriMesh& mesh, const DirectionSet& dirs,
                                 double delta);
SecondDiffStencil build_stencils(const TriMesh& mesh, const std::vector<Vec2>& dirs,
                                 double delta);

/// Centered second difference of the field at an interior node along
/// stencil direction dir.
double second_difference(const NodalField& field, const SecondDiffStencil& stencil,
                         int node, int dir);

/// Field dump: CSV `node_index,x,y,value`.
void write_field_csv(const NodalField& field, std::ostream& out);
void write_field_csv(const NodalField& field, const std::string& path);

}  // namespace twoscale
