// Acceptance suite: runs the shipped exit criteria end to end and prints
// one pass/fail line per criterion. `--criterion N` selects a single one.

#include "twoscale/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <sstream>

using namespace twoscale;

namespace {

struct Criterion {
  int id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

double half_sq(const Vec2& x) { return 0.5 * x.squaredNorm(); }

// --- 1: exactness ----------------------------------------------------------

Criterion exactness_suite() {
  Criterion c{1, "exactness suite (affine solve, quadratic differences, sign algebra)"};
  std::ostringstream os;
  bool ok = true;

  // Affine problem solved to 1e-8 at several resolutions.
  const TestProblem affine = find_problem("affine");
  double worst_affine = 0.0;
  for (double ht : {0.25, 0.125, 0.0625}) {
    const TriMesh mesh = generate_mesh(affine.problem.domain, ht);
    const OperatorContext ctx =
        OperatorContext::build(mesh, std::sqrt(ht), std::sqrt(ht));
    SolverConfig cfg;
    cfg.bisection_tol = 1e-11;
    cfg.nodal_tol = 1e-12;
    const NodalField u = solve(ctx, affine.problem, cfg).first;
    const NodalField exact = interpolate(mesh, affine.problem.exact);
    worst_affine = std::max(worst_affine, (u.values - exact.values).cwiseAbs().maxCoeff());
  }
  ok = ok && worst_affine <= 1e-8;
  os << "affine max error " << worst_affine;

  // Analytic centered second difference of |x|^2/2 equals 1.
  double worst_sdd = 0.0;
  for (double d : {0.9, 0.31, 0.07}) {
    for (double phi : {0.0, 0.4, 2.2}) {
      const Vec2 v(std::cos(phi), std::sin(phi));
      const Vec2 x(0.21, -0.4);
      const double sdd =
          (half_sq(x + d * v) - 2.0 * half_sq(x) + half_sq(x - d * v)) / (d * d);
      worst_sdd = std::max(worst_sdd, std::abs(sdd - 1.0));
    }
  }
  ok = ok && worst_sdd <= 1e-12;
  os << ", quadratic second-difference defect " << worst_sdd;

  // Sign algebra: -|x|^2/2 on an interpolation-exact patch gives T = -2.
  const TriMesh patch = make_structured_square_mesh(1.0, 16);
  const double delta = 2.0 * (2.0 / 16);
  const OperatorContext ctx = OperatorContext::with_tuples(patch, axes_tuple_set(), delta);
  const NodalField neg = interpolate(patch, [](const Vec2& x) { return -0.5 * x.squaredNorm(); });
  double worst_T = 0.0;
  for (int node : classify_delta_interior(patch, delta).delta_interior)
    worst_T = std::max(worst_T, std::abs(apply_T(ctx, neg, node) + 2.0));
  ok = ok && worst_T <= 1e-9;
  os << ", sign-algebra defect " << worst_T;

  c.pass = ok;
  c.detail = os.str();
  return c;
}

// --- 2: interior barrier ----------------------------------------------------

Criterion barrier_suite() {
  Criterion c{2, "interior barrier T[q_h] >= 1 on the disk sequence"};
  double worst = 1e300;
  for (double ht : {0.125, 0.0625, 0.03125, 0.015625}) {
    const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), ht);
    const OperatorContext ctx =
        OperatorContext::build(mesh, std::sqrt(ht), std::sqrt(ht));
    const InteriorBarrier q = build_interior_barrier(mesh, Vec2::Zero(), 1.0);
    worst = std::min(worst, apply_T_all(ctx, q.field).minCoeff());
  }
  c.pass = worst >= 1.0 - 1e-9;
  std::ostringstream os;
  os << "min T[q_h] over h in {1/8..1/64}: " << worst;
  c.detail = os.str();
  return c;
}

// --- 3: consistency rates ---------------------------------------------------

Criterion consistency_suite() {
  Criterion c{3, "consistency rates (coupled exp-smooth, fixed-delta quadratic)"};
  const std::vector<double> hs{0.125, 0.0625, 0.03125, 0.015625};

  const RateReport coupled = consistency_study(
      find_problem("exp-smooth"), hs, CouplingRule::parse("h^0.5", "h^0.5"));
  const double eoc_coupled = coupled.aggregate_eoc_consistency_interior();

  const RateReport axes = consistency_study(find_problem("quadratic"), hs,
                                            CouplingRule::parse("0.25", "h^0.5"), true);
  const double eoc_axes = axes.aggregate_eoc_consistency_interior();

  c.pass = eoc_coupled >= 0.8 && eoc_axes >= 1.8;
  std::ostringstream os;
  os << "exp-smooth coupled EOC " << eoc_coupled << " (floor 0.8), quadratic axes EOC "
     << eoc_axes << " (floor 1.8)";
  c.detail = os.str();
  return c;
}

// --- 4: solver rates --------------------------------------------------------

Criterion solver_rates_suite() {
  Criterion c{4, "solver rates for exp-smooth under the sqrt(h) coupling"};
  SolverConfig cfg;
  cfg.bisection_tol = 1e-8;
  cfg.nodal_tol = 1e-9;
  const std::vector<double> hs{0.125, 0.0625, 0.03125, 0.015625};
  const RateReport rep = convergence_study(find_problem("exp-smooth"), hs,
                                           CouplingRule::parse("h^0.5", "h^0.5"), cfg);
  bool ok = rep.rows.size() == hs.size();
  for (const RateRow& r : rep.rows) ok = ok && r.solver_converged;

  // Each refinement strictly decreases the nodal error.
  for (size_t k = 0; k + 1 < rep.rows.size(); ++k)
    ok = ok && rep.rows[k + 1].err_linf_nodes < rep.rows[k].err_linf_nodes;

  const double eoc = rep.aggregate_eoc_nodes();
  ok = ok && eoc >= 0.45;

  // Boundary-layer control: the layer error scales with delta.
  double worst_layer = 0.0;
  for (const RateRow& r : rep.rows)
    worst_layer = std::max(worst_layer, r.boundary_layer_error / r.delta);
  ok = ok && worst_layer <= 100.0;

  c.pass = ok;
  std::ostringstream os;
  os << "nodal EOC " << eoc << " (floor 0.45; theory 1/2, companion experiments ~1)"
     << ", errors";
  for (const RateRow& r : rep.rows) os << ' ' << r.err_linf_nodes;
  os << ", max layer error / delta " << worst_layer;
  c.detail = os.str();
  return c;
}

// --- 5: degenerate rates ----------------------------------------------------

Criterion degenerate_suite() {
  Criterion c{5, "degenerate rates for cone-smoothed under delta = h^(2/beta)"};
  SolverConfig cfg;
  cfg.bisection_tol = 1e-8;
  cfg.nodal_tol = 1e-9;
  const double beta = 2.5;
  std::ostringstream delta_rule, theta_rule;
  delta_rule << "h^" << 2.0 / beta;
  theta_rule << "h^" << 1.0 - 2.0 / beta;
  const std::vector<double> hs{0.125, 0.0625, 0.03125};
  const RateReport rep =
      convergence_study(find_problem("cone-smoothed"), hs,
                        CouplingRule::parse(delta_rule.str(), theta_rule.str()), cfg);
  bool ok = rep.rows.size() == hs.size();
  for (const RateRow& r : rep.rows) ok = ok && r.solver_converged;
  for (size_t k = 0; k + 1 < rep.rows.size(); ++k)
    ok = ok && rep.rows[k + 1].err_linf_nodes < rep.rows[k].err_linf_nodes;
  const double eoc = rep.aggregate_eoc_nodes();
  ok = ok && eoc >= 0.2;

  c.pass = ok;
  std::ostringstream os;
  os << "nodal EOC " << eoc << " (floor 0.2), errors";
  for (const RateRow& r : rep.rows) os << ' ' << r.err_linf_nodes;
  c.detail = os.str();
  return c;
}

// --- 6: property suites -----------------------------------------------------

Criterion property_suite() {
  Criterion c{6, "randomized property suites"};
  const std::vector<CheckResult> checks = run_property_suites();
  bool ok = true;
  std::ostringstream os;
  for (const CheckResult& r : checks) {
    ok = ok && r.pass;
    os << "\n    " << (r.pass ? "[pass] " : "[FAIL] ") << r.name << ": " << r.detail;
  }
  c.pass = ok;
  c.detail = os.str();
  return c;
}

Criterion run_criterion(int id) {
  const auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  switch (id) {
    case 1: c = exactness_suite(); break;
    case 2: c = barrier_suite(); break;
    case 3: c = consistency_suite(); break;
    case 4: c = solver_rates_suite(); break;
    case 5: c = degenerate_suite(); break;
    case 6: c = property_suite(); break;
    default: throw std::invalid_argument("unknown criterion");
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected{1, 2, 3, 4, 5, 6};
  for (int a = 1; a + 1 < argc; ++a) {
    if (std::strcmp(argv[a], "--criterion") == 0) selected = {std::atoi(argv[a + 1])};
  }

  bool all_ok = true;
  for (int id : selected) {
    Criterion c;
    try {
      c = run_criterion(id);
    } catch (const std::exception& e) {
      c.id = id;
      c.title = "criterion";
      c.pass = false;
      c.detail = std::string("exception: ") + e.what();
    }
    all_ok = all_ok && c.pass;
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << ": "
              << c.title << " -- " << c.detail << "  (" << c.seconds << " s)\n";
  }
  return all_ok ? 0 : 1;
}
