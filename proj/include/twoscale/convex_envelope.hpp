#pragma once

#include "twoscale/ma_operator.hpp"

namespace twoscale {

struct SubdifferentialPolygon {
  int node = -1;
  std::vector<Vec2> gradients;  // convex hull of incident facet gradients, CCW
  double area = 0.0;
};

/// Convex envelope of a nodal field: the lower convex hull of the lifted
/// point cloud (x_i, w_i). Envelope heights are reported at every node;
/// the lower contact set holds the interior nodes where the field touches
/// its envelope, each with the subdifferential polygon of the envelope.
struct ConvexEnvelopeResult {
  Eigen::VectorXd envelope;
  std::vector<int> contact;                 // interior contact nodes, ascending
  std::vector<std::uint8_t> in_contact;     // per node
  std::vector<SubdifferentialPolygon> subdifferentials;  // parallel to contact

  int contact_index(int node) const;  // -1 when node is not in the contact set
};

ConvexEnvelopeResult convex_envelope(const TriMesh& mesh, const NodalField& field);

/// Area of the subdifferential polygon at a contact node; throws
/// std::logic_error for nodes outside the contact set.
double subdifferential_measure(const ConvexEnvelopeResult& result, int node);

/// |subdifferential| <= delta_hat^d * (product form of the operator on the
/// envelope field) at a contact node in the delta-interior region.
struct HyperRectangleCheck {
  double lhs_area = 0.0;
  double rhs_bound = 0.0;
};
HyperRectangleCheck check_hyper_rectangle_bound(const OperatorContext& ctx,
                                                const ConvexEnvelopeResult& result,
                                                int node);

/// Alexandroff estimate data for a field nonnegative on the boundary:
/// lhs = max over interior nodes of the negative part, rhs_sum = total
/// subdifferential measure over the contact set, ratio = lhs / rhs_sum^(1/d).
struct AlexandroffCheck {
  double lhs = 0.0;
  double rhs_sum = 0.0;
  double ratio = 0.0;
};
AlexandroffCheck alexandroff_check(const TriMesh& mesh, const NodalField& field);

/// At contact nodes the envelope's second differences cannot exceed the
/// field's. Returns the violating (node, direction) pairs; expected empty.
struct ContactSddViolation {
  int node = -1;
  int dir = -1;
  double envelope_sdd = 0.0;
  double field_sdd = 0.0;
};
std::vector<ContactSddViolation> contact_second_difference_check(
    const OperatorContext& ctx, const NodalField& field,
    const ConvexEnvelopeResult& result);

/// Shoelace area of a simple polygon.
double polygon_area(const std::vector<Vec2>& pts);

/// Convex hull of a 2D point set (monotone chain), counterclockwise.
std::vector<Vec2> convex_hull_2d(std::vector<Vec2> pts);

}  // namespace twoscale
