#pragma once

#include "twoscale/pwl_field.hpp"

namespace twoscale {

/// Interpolant of q(x) = 0.5 (|x - x0|^2 - R^2) with the domain contained
/// in B(x0, R). Discretely convex with operator values >= 1 at interior
/// nodes and q_h <= 0 on the boundary; scaled copies act as subsolutions.
struct InteriorBarrier {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  NodalField field;
};

/// Throws std::invalid_argument when some node lies outside B(x0, R).
InteriorBarrier build_interior_barrier(const TriMesh& mesh, const Vec2& x0, double R);

}  // namespace twoscale
