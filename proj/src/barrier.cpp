#include "twoscale/barrier.hpp"

#include <stdexcept>

namespace twoscale {

InteriorBarrier build_interior_barrier(const TriMesh& mesh, const Vec2& x0, double R) {
  for (const Vec2& p : mesh.nodes) {
    if ((p - x0).norm() > R * (1.0 + 1e-14))
      throw std::invalid_argument("interior barrier: radius too small for the mesh");
  }
  InteriorBarrier b;
  b.center = x0;
  b.radius = R;
  b.field = interpolate(
      mesh, [&](const Vec2& x) { return 0.5 * ((x - x0).squaredNorm() - R * R); });
  return b;
}

}  // namespace twoscale
