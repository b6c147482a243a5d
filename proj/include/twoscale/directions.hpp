#pragma once

#include "twoscale/geometry.hpp"

#include <array>
#include <vector>

namespace twoscale {

/// Finite set of unit directions covering the half-circle [0, pi).
/// Second differences are symmetric in v -> -v, so storing half the circle
/// is enough; covering statements count the antipodal closure.
struct DirectionSet {
  double theta = 0.0;       // covering parameter, chord metric
  std::vector<Vec2> dirs;   // unit vectors at angles k*pi/m, k = 0..m-1

  int size() const { return static_cast<int>(dirs.size()); }

  /// Chord distance from v to the nearest stored direction or its antipode.
  double covering_gap(const Vec2& v) const;
};

/// Equispaced directions with m >= ceil(pi/theta); m is bumped to the next
/// even integer so that the perpendicular of every stored direction is
/// again stored (perp of k is k + m/2), which the orthonormal tuples rely
/// on. Requires 0 < theta <= 1.
DirectionSet build_direction_set(double theta);

/// Orthonormal pairs (v, v_perp) assembled from a direction set. Tuple
/// components index into the parent set; their union is the whole set.
struct OrthoTupleSet {
  double theta = 0.0;
  std::vector<Vec2> dirs;                    // copy of the parent directions
  std::vector<std::array<int, 2>> tuples;    // indices into dirs

  int size() const { return static_cast<int>(tuples.size()); }
  Vec2 component(int tuple, int j) const { return dirs[tuples[tuple][j]]; }
};

OrthoTupleSet build_ortho_tuples(const DirectionSet& dirs);

/// Tuple set holding only the coordinate axes pair. Used by consistency
/// studies that eliminate the angular discretization error.
OrthoTupleSet axes_tuple_set();

}  // namespace twoscale
