#pragma once

#include "twoscale/solver.hpp"

#include <string>
#include <vector>

namespace twoscale {

/// Catalog entry: a Dirichlet problem with its exact solution (when known),
/// the analytic det D^2 u, and a regularity class tag.
struct TestProblem {
  std::string name;
  Problem problem;
  std::function<double(const Vec2&)> exact_det;  // equals problem.f for exact problems
  std::string regularity;  // classical-smooth | piecewise-smooth | degenerate
};

/// Ships on the unit disk:
///   affine         u affine, f = 0
///   quadratic      u = |x|^2 / 2, f = 1
///   exp-smooth     u = exp(|x|^2 / 2), f = (1 + |x|^2) exp(|x|^2)
///   cone-smoothed  u = max(|x| - 0.2, 0)^2 / 2, f = max(|x| - 0.2, 0) / |x|
std::vector<TestProblem> catalog();

TestProblem find_problem(const std::string& name);

/// Spot check that f matches the determinant of the finite-difference
/// Hessian of the exact solution at random points (skipping FD-unsafe
/// neighborhoods of Hessian discontinuities). Returns the max deviation.
double spot_check_exact_det(const TestProblem& tp, int samples, std::uint64_t seed);

}  // namespace twoscale
