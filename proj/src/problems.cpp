#include "twoscale/problems.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace twoscale {

namespace {

TestProblem make_affine() {
  TestProblem tp;
  tp.name = "affine";
  tp.regularity = "classical-smooth";
  auto u = [](const Vec2& x) { return 0.2 + 0.5 * x.x() - 0.3 * x.y(); };
  tp.problem.domain = DomainSpec::unit_disk();
  tp.problem.f = [](const Vec2&) { return 0.0; };
  tp.problem.g = u;
  tp.problem.exact = u;
  tp.problem.degenerate = true;
  tp.exact_det = tp.problem.f;
  return tp;
}

TestProblem make_quadratic() {
  TestProblem tp;
  tp.name = "quadratic";
  tp.regularity = "classical-smooth";
  auto u = [](const Vec2& x) { return 0.5 * x.squaredNorm(); };
  tp.problem.domain = DomainSpec::unit_disk();
  tp.problem.f = [](const Vec2&) { return 1.0; };
  tp.problem.g = u;
  tp.problem.exact = u;
  tp.exact_det = tp.problem.f;
  return tp;
}

TestProblem make_exp_smooth() {
  TestProblem tp;
  tp.name = "exp-smooth";
  tp.regularity = "classical-smooth";
  auto u = [](const Vec2& x) { return std::exp(0.5 * x.squaredNorm()); };
  // D^2 u = exp(|x|^2/2) (I + x x^T), det = (1 + |x|^2) exp(|x|^2).
  tp.problem.domain = DomainSpec::unit_disk();
  tp.problem.f = [](const Vec2& x) {
    return (1.0 + x.squaredNorm()) * std::exp(x.squaredNorm());
  };
  tp.problem.g = u;
  tp.problem.exact = u;
  tp.exact_det = tp.problem.f;
  return tp;
}

TestProblem make_cone_smoothed() {
  TestProblem tp;
  tp.name = "cone-smoothed";
  tp.regularity = "degenerate";
  const double r0 = 0.2;
  auto u = [r0](const Vec2& x) {
    const double t = std::max(x.norm() - r0, 0.0);
    return 0.5 * t * t;
  };
  // Radial Hessian eigenvalues: 1 and (r - r0)/r outside the ball, 0 inside.
  tp.problem.domain = DomainSpec::unit_disk();
  tp.problem.f = [r0](const Vec2& x) {
    const double r = x.norm();
    if (r <= r0) return 0.0;
    return (r - r0) / r;
  };
  tp.problem.g = u;
  tp.problem.exact = u;
  tp.problem.degenerate = true;
  tp.exact_det = tp.problem.f;
  return tp;
}

}  // namespace

std::vector<TestProblem> catalog() {
  return {make_affine(), make_quadratic(), make_exp_smooth(), make_cone_smoothed()};
}

TestProblem find_problem(const std::string& name) {
  for (TestProblem& tp : catalog())
    if (tp.name == name) return tp;
  throw std::invalid_argument("unknown problem: " + name);
}

double spot_check_exact_det(const TestProblem& tp, int samples, std::uint64_t seed) {
  if (!tp.problem.exact) throw std::invalid_argument("problem has no exact solution");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double step = 1e-5;
  const auto& u = tp.problem.exact;
  double worst = 0.0;
  int accepted = 0;
  while (accepted < samples) {
    const Vec2 p(0.9 * unit(rng), 0.9 * unit(rng));
    if (p.norm() > 0.9) continue;
    // Keep the FD stencil away from the kink of the cone problem.
    if (tp.name == "cone-smoothed" &&
        (std::abs(p.norm() - 0.2) < 0.05 || p.norm() < 0.05))
      continue;
    ++accepted;
    const Vec2 ex(step, 0.0), ey(0.0, step);
    const double uxx = (u(p + ex) - 2.0 * u(p) + u(p - ex)) / (step * step);
    const double uyy = (u(p + ey) - 2.0 * u(p) + u(p - ey)) / (step * step);
    const double uxy =
        (u(p + ex + ey) - u(p + ex - ey) - u(p - ex + ey) + u(p - ex - ey)) /
        (4.0 * step * step);
    const double det = uxx * uyy - uxy * uxy;
    worst = std::max(worst, std::abs(det - tp.problem.f(p)));
  }
  return worst;
}

}  // namespace twoscale
