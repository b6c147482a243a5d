#include "twoscale/ma_operator.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace twoscale;

namespace {
double half_sq(const Vec2& x) { return 0.5 * x.squaredNorm(); }
double neg_half_sq(const Vec2& x) { return -0.5 * x.squaredNorm(); }
double affine_fn(const Vec2& x) { return 1.0 + 0.3 * x.x() - 0.9 * x.y(); }
}  // namespace

TEST_CASE("apply_T: sign algebra of the concave quadratic on an exact patch") {
  // Structured lattice with delta = 2 * spacing: stencil endpoints along the
  // axes land on lattice nodes, so the interpolation is exact there and each
  // second difference of -|x|^2/2 equals exactly -1. The bracket is then
  // 0 - (1 + 1) = -2.
  const TriMesh mesh = make_structured_square_mesh(1.0, 16);
  const double delta = 2.0 * (2.0 / 16);
  const OperatorContext ctx = OperatorContext::with_tuples(mesh, axes_tuple_set(), delta);
  const NodalField f = interpolate(mesh, neg_half_sq);
  const DeltaInteriorSets sets = classify_delta_interior(mesh, delta);
  REQUIRE(!sets.delta_interior.empty());
  for (int node : sets.delta_interior)
    CHECK(apply_T(ctx, f, node) == doctest::Approx(-2.0).epsilon(1e-12));

  const NodalField q = interpolate(mesh, half_sq);
  for (int node : sets.delta_interior)
    CHECK(apply_T(ctx, q, node) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("apply_T: affine fields give zero") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.25);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.3, 0.6);
  const NodalField f = interpolate(mesh, affine_fn);
  for (int r = 0; r < ctx.n_interior(); ++r)
    CHECK(std::abs(apply_T(ctx, f, ctx.interior_node(r))) <= 1e-10);
}

TEST_CASE("apply_T: quadratic value and brute-force tuple enumeration oracle") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.15);
  const double delta = 0.3;
  const OperatorContext ctx = OperatorContext::build(mesh, delta, 0.5);
  const NodalField f = interpolate(mesh, half_sq);
  const DeltaInteriorSets sets = classify_delta_interior(mesh, delta);
  for (size_t k = 0; k < sets.delta_interior.size(); k += 5) {
    const int node = sets.delta_interior[k];
    const double T = apply_T(ctx, f, node);
    CHECK(T == doctest::Approx(1.0).epsilon(mesh.h * mesh.h / (delta * delta) * 4 + 1e-9));

    // Oracle: enumerate tuples through second_difference directly.
    double best = std::numeric_limits<double>::infinity();
    for (int t = 0; t < ctx.tuples.size(); ++t) {
      double prod = 1.0, neg = 0.0;
      for (int j = 0; j < 2; ++j) {
        const double s = second_difference(f, ctx.stencil, node, ctx.tuples.tuples[t][j]);
        prod *= std::max(s, 0.0);
        neg += std::max(-s, 0.0);
      }
      best = std::min(best, prod - neg);
    }
    CHECK(T == doctest::Approx(best).epsilon(1e-13));
  }
}

TEST_CASE("apply_T_all: zero field, per-node agreement, deterministic order") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.3);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.3, 0.7);
  const NodalField zero(mesh);
  const Eigen::VectorXd Tz = apply_T_all(ctx, zero);
  CHECK(Tz.cwiseAbs().maxCoeff() == 0.0);

  const NodalField f = interpolate(mesh, half_sq);
  const Eigen::VectorXd T = apply_T_all(ctx, f);
  for (int r = 0; r < ctx.n_interior(); ++r) {
    CHECK(T[r] == apply_T(ctx, f, ctx.interior_node(r)));
    if (r > 0) CHECK(ctx.interior_node(r) > ctx.interior_node(r - 1));
  }
}

TEST_CASE("is_discretely_convex: quadratic, concave quadratic, affine") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.25);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.3, 0.7);

  CHECK(is_discretely_convex(ctx, interpolate(mesh, half_sq)).convex);
  CHECK(is_discretely_convex(ctx, interpolate(mesh, affine_fn)).convex);

  const ConvexityReport rep = is_discretely_convex(ctx, interpolate(mesh, neg_half_sq));
  CHECK(!rep.convex);
  // Every (interior node, direction) pair violates for the concave quadratic.
  CHECK(static_cast<int>(rep.violations.size()) ==
        ctx.n_interior() * ctx.stencil.n_dirs);
}

TEST_CASE("product_form_T agrees with apply_T on discretely convex fields") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.2);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.25, 0.6);
  const NodalField q = interpolate(mesh, half_sq);
  for (int r = 0; r < ctx.n_interior(); r += 3) {
    const int node = ctx.interior_node(r);
    CHECK(product_form_T(ctx, q, node) ==
          doctest::Approx(apply_T(ctx, q, node)).epsilon(1e-12));
  }
  const NodalField bad = interpolate(mesh, neg_half_sq);
  CHECK_THROWS_AS(product_form_T(ctx, bad, ctx.interior_node(0)), std::logic_error);
}

TEST_CASE("concavity_gap: zero partner, doubled quadratic, contract error") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.2);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.25, 0.6);
  const NodalField q = interpolate(mesh, half_sq);
  const NodalField zero(mesh);
  const int node = ctx.interior_node(ctx.n_interior() / 2);

  CHECK(std::abs(concavity_gap(ctx, q, zero, node)) <= 1e-12);
  CHECK(concavity_gap(ctx, q, q, node) >= -1e-9);

  const NodalField bad = interpolate(mesh, neg_half_sq);
  CHECK_THROWS_AS(concavity_gap(ctx, q, bad, node), std::logic_error);
}

TEST_CASE("apply_T is non-increasing in the diagonal value") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.25);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.3, 0.7);
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  NodalField f(mesh);
  for (int i = 0; i < mesh.n_nodes(); ++i) f.values[i] = uni(rng);
  const int node = ctx.interior_node(1);
  double prev = apply_T(ctx, f, node);
  for (double t : {0.1, 0.5, 2.0}) {
    NodalField g(mesh, f.values);
    g.values[node] += t;
    const double cur = apply_T(ctx, g, node);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("apply_T reports the first minimizing tuple on exact ties") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.3);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.3, 0.7);
  const NodalField zero(mesh);  // all brackets are exactly zero
  int arg = -1;
  apply_T(ctx, zero, ctx.interior_node(0), &arg);
  CHECK(arg == 0);
}

TEST_CASE("operator dump has the documented header") {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), 0.4);
  const OperatorContext ctx = OperatorContext::build(mesh, 0.3, 0.8);
  std::ostringstream os;
  write_operator_csv(ctx, interpolate(mesh, half_sq), os);
  CHECK(os.str().rfind("node,T_value,argmin_tuple_index\n", 0) == 0);
}
