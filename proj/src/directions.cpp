#include "twoscale/directions.hpp"

#include <cmath>
#include <stdexcept>

namespace twoscale {

namespace {
constexpr double kPi = 3.14159265358979323846;

Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }
}  // namespace

double DirectionSet::covering_gap(const Vec2& v) const {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& d : dirs) {
    best = std::min(best, (v - d).norm());
    best = std::min(best, (v + d).norm());
  }
  return best;
}

DirectionSet build_direction_set(double theta) {
  if (!(theta > 0.0) || theta > 1.0)
    throw std::invalid_argument("theta must lie in (0, 1]");
  int m = static_cast<int>(std::ceil(kPi / theta));
  if (m % 2 != 0) ++m;  // keep perpendiculars inside the set
  DirectionSet set;
  set.theta = theta;
  set.dirs.reserve(m);
  for (int k = 0; k < m / 2; ++k) {
    const double phi = k * kPi / m;
    set.dirs.emplace_back(std::cos(phi), std::sin(phi));
  }
  // Second half by exact rotation, so tuple Gram matrices are exact.
  for (int k = 0; k < m / 2; ++k) set.dirs.push_back(rot90(set.dirs[k]));
  return set;
}

OrthoTupleSet build_ortho_tuples(const DirectionSet& dirs) {
  const int m = dirs.size();
  if (m < 2 || m % 2 != 0)
    throw std::invalid_argument("direction set must have even size");
  OrthoTupleSet set;
  set.theta = dirs.theta;
  set.dirs = dirs.dirs;
  set.tuples.reserve(m / 2);
  for (int k = 0; k < m / 2; ++k) set.tuples.push_back({k, k + m / 2});
  return set;
}

OrthoTupleSet axes_tuple_set() {
  OrthoTupleSet set;
  set.theta = 0.0;
  set.dirs = {Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
  set.tuples = {{0, 1}};
  return set;
}

}  // namespace twoscale
