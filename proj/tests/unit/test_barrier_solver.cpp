#include "twoscale/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace twoscale;

namespace {
double half_sq(const Vec2& x) { return 0.5 * x.squaredNorm(); }
double affine_fn(const Vec2& x) { return 0.1 + 0.6 * x.x() - 0.4 * x.y(); }

Problem affine_problem() {
  Problem p;
  p.domain = DomainSpec::unit_disk();
  p.f = [](const Vec2&) { return 0.0; };
  p.g = affine_fn;
  p.exact = affine_fn;
  p.degenerate = true;
  return p;
}

Problem quadratic_problem() {
  Problem p;
  p.domain = DomainSpec::unit_disk();
  p.f = [](const Vec2&) { return 1.0; };
  p.g = half_sq;
  p.exact = half_sq;
  return p;
}
}  // namespace

TEST_CASE("interior barrier: boundary values, minimum, operator lower bound") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.125);
  const InteriorBarrier q = build_interior_barrier(mesh, Vec2::Zero(), 1.0);

  int nearest = 0;
  double best = 1e300;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    if (mesh.node_on_boundary[i]) CHECK(std::abs(q.field.values[i]) <= 1e-13);
    if (mesh.nodes[i].norm() < best) {
      best = mesh.nodes[i].norm();
      nearest = i;
    }
  }
  int argmin = 0;
  q.field.values.minCoeff(&argmin);
  CHECK(argmin == nearest);
  CHECK(q.field.values[argmin] == doctest::Approx(-0.5).epsilon(0.05));

  for (double ht : {0.125, 0.0625}) {
    const TriMesh m = generate_mesh(DomainSpec::unit_disk(), ht);
    const OperatorContext ctx = OperatorContext::build(m, std::sqrt(ht), std::sqrt(ht));
    const InteriorBarrier qb = build_interior_barrier(m, Vec2::Zero(), 1.0);
    CHECK(apply_T_all(ctx, qb.field).minCoeff() >= 1.0 - 1e-9);
  }
}

TEST_CASE("interior barrier: scaling raises the operator by sigma^d") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.125);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.3, 0.5);
  const InteriorBarrier q = build_interior_barrier(mesh, Vec2::Zero(), 1.0);
  for (double sigma : {2.0, 5.0}) {
    const NodalField scaled(mesh, sigma * q.field.values);
    CHECK(apply_T_all(ctx, scaled).minCoeff() >= sigma * sigma * (1.0 - 1e-9));
  }
}

TEST_CASE("interior barrier: undersized radius is rejected") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.25);
  CHECK_THROWS_AS(build_interior_barrier(mesh, Vec2::Zero(), 0.8), std::invalid_argument);
}

TEST_CASE("initial_guess: subsolution with dominating operator values") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.2);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.3, 0.5);
  const Problem p = affine_problem();
  const NodalField w0 = initial_guess(ctx, p);

  for (int i : mesh.boundary_loop) CHECK(w0.values[i] == p.g(mesh.nodes[i]));
  // f = 0 makes sigma = 1; the barrier keeps T >= 1 > 0.
  CHECK(apply_T_all(ctx, w0).minCoeff() >= 1.0 - 1e-9);

  const Eigen::VectorXd residual0 =
      apply_T_all(ctx, w0);  // finite residual, recordable
  CHECK(std::isfinite(residual0.cwiseAbs().maxCoeff()));
}

TEST_CASE("node_solve: fixed point, monotone response to f, grid-scan oracle") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.2);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.3, 0.5);
  SolverConfig cfg;

  // Already solved: T of an affine interpolant is 0 at every node.
  const NodalField aff = interpolate(mesh, affine_fn);
  const int node = ctx.interior_node(ctx.n_interior() / 3);
  CHECK(node_solve(ctx, aff, node, 0.0, cfg) == aff.values[node]);

  // Monotonicity: larger f forces the nodal value down.
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> uni(-0.3, 0.3);
  NodalField f(mesh, aff.values);
  for (int i = 0; i < mesh.n_nodes(); ++i) f.values[i] += uni(rng);
  const double t_low = node_solve(ctx, f, node, 0.5, cfg);
  const double t_high = node_solve(ctx, f, node, 1.5, cfg);
  CHECK(t_high <= t_low + 1e-12);

  // Brute-force grid scan over a wide bracket at 1e-6 resolution.
  auto phi = [&](double t) {
    NodalField g(mesh, f.values);
    g.values[node] = t;
    return apply_T(ctx, g, node);
  };
  const double f_i = 0.8;
  double best_t = 0.0, best_err = 1e300;
  for (double t = f.values[node] - 2.0; t <= f.values[node] + 2.0; t += 1e-6) {
    const double err = std::abs(phi(t) - f_i);
    if (err < best_err) {
      best_err = err;
      best_t = t;
    }
  }
  CHECK(node_solve(ctx, f, node, f_i, cfg) == doctest::Approx(best_t).epsilon(1e-5));
}

TEST_CASE("solve: affine data reproduced to 1e-8") {
  const Problem p = affine_problem();
  for (double ht : {0.25, 0.125}) {
    const TriMesh mesh = generate_mesh(p.domain, ht);
    const OperatorContext ctx = OperatorContext::build(mesh, std::sqrt(ht), std::sqrt(ht));
    SolverConfig cfg;
    cfg.bisection_tol = 1e-11;
    cfg.nodal_tol = 1e-12;
    const auto [u, rep] = solve(ctx, p, cfg);
    CHECK(rep.converged);
    const NodalField exact = interpolate(mesh, affine_fn);
    CHECK((u.values - exact.values).cwiseAbs().maxCoeff() <= 1e-8);
    for (int i : mesh.boundary_loop) CHECK(u.values[i] == p.g(mesh.nodes[i]));
    CHECK(rep.min_update >= -1e-8);  // monotone sweeps from the subsolution
    CHECK(!rep.residual_history.empty());
  }
}

TEST_CASE("solve: quadratic error shrinks under refinement and stays convex") {
  const Problem p = quadratic_problem();
  double prev = -1.0;
  for (double ht : {0.25, 0.125}) {
    const TriMesh mesh = generate_mesh(p.domain, ht);
    const OperatorContext ctx = OperatorContext::build(mesh, std::sqrt(ht), std::sqrt(ht));
    SolverConfig cfg;
    cfg.bisection_tol = 1e-10;
    cfg.nodal_tol = 1e-11;
    const auto [u, rep] = solve(ctx, p, cfg);
    CHECK(rep.final_residual <= 10.0 * cfg.bisection_tol);
    const NodalField exact = interpolate(mesh, half_sq);
    const double err = (u.values - exact.values).cwiseAbs().maxCoeff();
    if (prev > 0.0) CHECK(err < prev);
    prev = err;
    CHECK(is_discretely_convex(ctx, u).convex);
  }
}

TEST_CASE("solve: determinant homogeneity under u -> 2u") {
  // det D^2 (2u) = 4 det D^2 u, so (4f, 2g) must produce twice the solution.
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.2);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.4, 0.5);
  SolverConfig cfg;
  cfg.bisection_tol = 1e-11;
  cfg.nodal_tol = 1e-12;

  const Problem p1 = quadratic_problem();
  Problem p2 = p1;
  p2.f = [](const Vec2&) { return 4.0; };
  p2.g = [](const Vec2& x) { return x.squaredNorm(); };

  const auto [u1, r1] = solve(ctx, p1, cfg);
  const auto [u2, r2] = solve(ctx, p2, cfg);
  CHECK((u2.values - 2.0 * u1.values).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("solve: sweep limit raises SolveFailure with the partial report") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.3);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.4, 0.6);
  SolverConfig cfg;
  cfg.max_sweeps = 1;
  try {
    solve(ctx, quadratic_problem(), cfg);
    FAIL("expected SolveFailure");
  } catch (const SolveFailure& e) {
    CHECK(e.report.sweeps == 1);
    CHECK(e.report.residual_history.size() == 1);
    CHECK(!e.report.converged);
  }
}

TEST_CASE("solve: Jacobi mode and red-black order reach the same solution") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.3);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.4, 0.6);
  const Problem p = quadratic_problem();
  SolverConfig cfg;
  cfg.bisection_tol = 1e-10;
  cfg.nodal_tol = 1e-11;

  const NodalField base = solve(ctx, p, cfg).first;

  SolverConfig jac = cfg;
  jac.mode = SolverConfig::Mode::Jacobi;
  const auto [uj, repj] = solve(ctx, p, jac);
  CHECK(repj.mode == "jacobi");
  CHECK((uj.values - base.values).cwiseAbs().maxCoeff() <= 1e-7);

  SolverConfig rb = cfg;
  rb.order = SolverConfig::Order::RedBlack;
  const auto [ur, repr] = solve(ctx, p, rb);
  CHECK(repr.order == "red-black");
  CHECK((ur.values - base.values).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("solve: negative f is rejected") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.3);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.4, 0.6);
  Problem p = quadratic_problem();
  p.f = [](const Vec2&) { return -1.0; };
  CHECK_THROWS_AS(solve(ctx, p), std::invalid_argument);
}
