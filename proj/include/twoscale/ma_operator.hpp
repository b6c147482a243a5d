#pragma once

#include "twoscale/pwl_field.hpp"

#include <iosfwd>
#include <utility>

namespace twoscale {

/// Everything needed to evaluate the two-scale operator
///   T[w](x_i) = min over tuples (v_1..v_d) of
///               prod_j (sdd w(x_i;v_j))^+  -  sum_j (sdd w(x_i;v_j))^-
/// on one mesh: the tuple set, the cached second-difference stencil and the
/// scales (h, delta, theta). Immutable after construction.
struct OperatorContext {
  const TriMesh* mesh = nullptr;
  OrthoTupleSet tuples;
  SecondDiffStencil stencil;
  double delta = 0.0;
  double theta = 0.0;
  int dim = 2;

  /// Standard construction: S_theta directions, perpendicular pairs,
  /// stencil over their union.
  static OperatorContext build(const TriMesh& mesh, double delta, double theta);

  /// Custom tuple set (e.g. the exact axes pair); theta recorded as given
  /// by the tuple set.
  static OperatorContext with_tuples(const TriMesh& mesh, OrthoTupleSet tuples,
                                     double delta);

  int n_interior() const { return stencil.n_rows(); }
  int interior_node(int row) const { return stencil.interior[row]; }
  double delta_hat(int node) const { return stencil.delta_hat[stencil.row_of_node[node]]; }
};

/// Operator value at one interior node; optionally reports the first tuple
/// attaining the min (ties broken by lowest tuple index).
double apply_T(const OperatorContext& ctx, const NodalField& field, int node,
               int* argmin_tuple = nullptr);

/// Values at every interior node, ordered by ascending node id (the
/// stencil row order).
Eigen::VectorXd apply_T_all(const OperatorContext& ctx, const NodalField& field);

struct ConvexityReport {
  bool convex = true;
  std::vector<std::pair<int, int>> violations;  // (node, direction)
};

/// Discrete convexity: all second differences >= -1e-10 at interior nodes
/// along all stencil directions.
ConvexityReport is_discretely_convex(const OperatorContext& ctx, const NodalField& field);

/// Plain product form min over tuples of prod_j sdd(x_i; v_j), valid when
/// the field is discretely convex at the node (all parts nonnegative);
/// throws std::logic_error otherwise.
double product_form_T(const OperatorContext& ctx, const NodalField& field, int node);

/// T[u+w]^(1/d) - T[u]^(1/d) - T[w]^(1/d) at a node where both fields have
/// nonnegative second differences; throws std::logic_error otherwise.
double concavity_gap(const OperatorContext& ctx, const NodalField& u,
                     const NodalField& w, int node);

/// Operator dump: CSV `node,T_value,argmin_tuple_index`.
void write_operator_csv(const OperatorContext& ctx, const NodalField& field,
                        std::ostream& out);

}  // namespace twoscale
