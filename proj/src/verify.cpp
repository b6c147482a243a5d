#include "twoscale/verify.hpp"

#include <json.hpp>

#include <random>
#include <sstream>

namespace twoscale {

namespace {

NodalField random_field(const TriMesh& mesh, std::mt19937_64& rng, double lo_boundary,
                        double hi_boundary) {
  std::uniform_real_distribution<double> inner(-1.0, 1.0);
  std::uniform_real_distribution<double> edge(lo_boundary, hi_boundary);
  NodalField f(mesh);
  for (int i = 0; i < mesh.n_nodes(); ++i)
    f.values[i] = mesh.is_interior(i) ? inner(rng) : edge(rng);
  return f;
}

NodalField convexify(const TriMesh& mesh, const NodalField& f) {
  return NodalField(mesh, convex_envelope(mesh, f).envelope);
}

CheckResult convexity_equivalence(const TriMesh& mesh, const OperatorContext& ctx,
                                  const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0xa1);
  CheckResult res{"convexity-equivalence"};
  double worst_T = 0.0, worst_pf = 0.0;
  for (int k = 0; k < opt.n_fields; ++k) {
    const NodalField raw = random_field(mesh, rng, -1.0, 1.0);
    const NodalField cvx = convexify(mesh, raw);

    // Convex direction: all second differences nonnegative implies T >= 0
    // everywhere and the plain product form agrees with the operator.
    if (!is_discretely_convex(ctx, cvx).convex) {
      res.detail = "convexified field flagged non-convex";
      return res;
    }
    for (int r = 0; r < ctx.n_interior(); ++r) {
      const int node = ctx.interior_node(r);
      const double T = apply_T(ctx, cvx, node);
      worst_T = std::min(worst_T, T);
      worst_pf = std::max(worst_pf, std::abs(T - product_form_T(ctx, cvx, node)));
    }

    // Non-convex direction: a negative second difference forces T < 0 at
    // that node (the tuple holding the direction has zero product part).
    const ConvexityReport rep = is_discretely_convex(ctx, raw);
    if (!rep.convex) {
      const auto [node, dir] = rep.violations.front();
      const double s = second_difference(raw, ctx.stencil, node, dir);
      if (apply_T(ctx, raw, node) > -std::abs(s) + 1e-12) {
        res.detail = "negative second difference without negative operator value";
        return res;
      }
    }
  }
  res.lhs = worst_T;
  res.rhs = worst_pf;
  res.pass = worst_T >= -1e-9 && worst_pf <= 1e-12;
  std::ostringstream os;
  os << "min T over convexified fields " << worst_T << ", max |T - product form| "
     << worst_pf;
  res.detail = os.str();
  return res;
}

CheckResult comparison_principle(const TriMesh& mesh, const OperatorContext& ctx,
                                 const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0xb2);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  CheckResult res{"comparison-principle"};
  double worst = -std::numeric_limits<double>::infinity();
  SolverConfig cfg;
  cfg.bisection_tol = 1e-10;
  cfg.nodal_tol = 1e-11;
  for (int k = 0; k < opt.n_problem_pairs; ++k) {
    const double a = uni(rng), b = 2.0 * uni(rng), c = 0.2 + 2.0 * uni(rng);
    const double phi = 6.28318530717958648 * uni(rng);
    const Vec2 dir(std::cos(phi), std::sin(phi));
    const double gx = uni(rng) - 0.5, gy = uni(rng) - 0.5, gc = uni(rng);
    const double drop = uni(rng);

    Problem p2;
    p2.domain = DomainSpec::unit_disk();
    p2.f = [a, b, dir](const Vec2& x) { return a + b * std::pow(dir.dot(x), 2); };
    p2.g = [gx, gy, gc](const Vec2& x) { return gx * x.x() + gy * x.y() + gc; };
    Problem p1 = p2;
    p1.f = [f2 = p2.f, c](const Vec2& x) { return f2(x) + c; };
    p1.g = [g2 = p2.g, drop](const Vec2& x) { return g2(x) - drop; };

    const NodalField u1 = solve(ctx, p1, cfg).first;
    const NodalField u2 = solve(ctx, p2, cfg).first;
    worst = std::max(worst, (u1.values - u2.values).maxCoeff());
  }
  res.lhs = worst;
  res.rhs = 1e-6;
  res.pass = worst <= 1e-6;
  std::ostringstream os;
  os << "max (u1 - u2) over " << opt.n_problem_pairs << " pairs: " << worst;
  res.detail = os.str();
  return res;
}

CheckResult operator_concavity(const TriMesh& mesh, const OperatorContext& ctx,
                               const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0xc3);
  CheckResult res{"operator-concavity"};
  double worst = 0.0;
  const int pairs = std::max(opt.n_fields, 50);
  for (int k = 0; k < pairs; ++k) {
    const NodalField u = convexify(mesh, random_field(mesh, rng, -1.0, 1.0));
    const NodalField w = convexify(mesh, random_field(mesh, rng, -1.0, 1.0));
    const NodalField s(mesh, u.values + w.values);
    const Eigen::VectorXd Tu = apply_T_all(ctx, u);
    const Eigen::VectorXd Tw = apply_T_all(ctx, w);
    const Eigen::VectorXd Ts = apply_T_all(ctx, s);
    for (int r = 0; r < ctx.n_interior(); ++r) {
      const double gap = std::sqrt(std::max(Ts[r], 0.0)) -
                         std::sqrt(std::max(Tu[r], 0.0)) -
                         std::sqrt(std::max(Tw[r], 0.0));
      worst = std::min(worst, gap);
    }
  }
  res.lhs = worst;
  res.rhs = -1e-9;
  res.pass = worst >= -1e-9;
  std::ostringstream os;
  os << "min concavity gap over " << pairs << " convexified pairs: " << worst;
  res.detail = os.str();
  return res;
}

CheckResult matrix_concavity(const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0xd4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CheckResult res{"matrix-concavity"};
  auto random_spsd = [&]() {
    Eigen::Matrix2d m;
    m << gauss(rng), gauss(rng), gauss(rng), gauss(rng);
    return Eigen::Matrix2d(m.transpose() * m);
  };
  double worst_sum = 0.0, worst_trace = 0.0;
  for (int k = 0; k < opt.n_matrix_pairs; ++k) {
    const Eigen::Matrix2d A = random_spsd();
    const Eigen::Matrix2d B = random_spsd();
    const double gap = std::sqrt(std::max((A + B).determinant(), 0.0)) -
                       std::sqrt(std::max(A.determinant(), 0.0)) -
                       std::sqrt(std::max(B.determinant(), 0.0));
    worst_sum = std::min(worst_sum, gap);

    // Part (i): det(A)^(1/2) <= tr(A C)/2 over SPD C with det C = 1.
    Eigen::Matrix2d C = random_spsd() + 0.05 * Eigen::Matrix2d::Identity();
    C /= std::sqrt(C.determinant());
    const double slack = 0.5 * (A * C).trace() - std::sqrt(std::max(A.determinant(), 0.0));
    worst_trace = std::min(worst_trace, slack);
  }
  res.lhs = worst_sum;
  res.rhs = worst_trace;
  res.pass = worst_sum >= -1e-12 && worst_trace >= -1e-12;
  std::ostringstream os;
  os << "min superadditivity gap " << worst_sum << ", min trace slack " << worst_trace;
  res.detail = os.str();
  return res;
}

CheckResult hyper_rectangle_volume(const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0xe5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  CheckResult res{"hyper-rectangle-volume"};
  double worst_rel = 0.0;
  for (int k = 0; k < opt.n_rectangles; ++k) {
    const double phi = 3.14159265358979324 * uni(rng);
    const Vec2 v1(std::cos(phi), std::sin(phi));
    const Vec2 v2(-v1.y(), v1.x());
    const double a1 = -uni(rng), b1 = a1 + 0.6 + uni(rng);
    const double a2 = -uni(rng), b2 = a2 + 0.6 + uni(rng);
    const double exact = (b1 - a1) * (b2 - a2);

    // Tight bounding box from the four corners keeps the hit rate near 1/2.
    Vec2 lo(1e300, 1e300), hi(-1e300, -1e300);
    for (double c1 : {a1, b1})
      for (double c2 : {a2, b2}) {
        const Vec2 corner = c1 * v1 + c2 * v2;
        lo = lo.cwiseMin(corner);
        hi = hi.cwiseMax(corner);
      }
    std::uniform_real_distribution<double> sx(lo.x(), hi.x()), sy(lo.y(), hi.y());
    long hits = 0;
    for (int s = 0; s < opt.mc_samples; ++s) {
      const Vec2 p(sx(rng), sy(rng));
      const double d1 = p.dot(v1), d2 = p.dot(v2);
      if (d1 >= a1 && d1 <= b1 && d2 >= a2 && d2 <= b2) ++hits;
    }
    const double box = (hi.x() - lo.x()) * (hi.y() - lo.y());
    const double estimate = box * static_cast<double>(hits) / opt.mc_samples;
    worst_rel = std::max(worst_rel, std::abs(estimate - exact) / exact);
  }
  res.lhs = worst_rel;
  res.rhs = 0.01;
  res.pass = worst_rel <= 0.01;
  std::ostringstream os;
  os << "max Monte-Carlo relative deviation over " << opt.n_rectangles
     << " rotated rectangles: " << worst_rel;
  res.detail = os.str();
  return res;
}

CheckResult subdifferential_bound(const TriMesh& mesh, const OperatorContext& ctx,
                                  const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0xf6);
  CheckResult res{"subdifferential-bound"};
  const DeltaInteriorSets sets = classify_delta_interior(mesh, ctx.delta);
  std::vector<std::uint8_t> in_delta(mesh.n_nodes(), 0);
  for (int node : sets.delta_interior) in_delta[node] = 1;
  double worst = -std::numeric_limits<double>::infinity();
  int checked = 0;
  for (int k = 0; k < opt.n_fields; ++k) {
    const NodalField cvx = convexify(mesh, random_field(mesh, rng, -1.0, 1.0));
    const ConvexEnvelopeResult env = convex_envelope(mesh, cvx);
    for (int node : env.contact) {
      if (!in_delta[node]) continue;
      const HyperRectangleCheck c = check_hyper_rectangle_bound(ctx, env, node);
      worst = std::max(worst, c.lhs_area - c.rhs_bound);
      ++checked;
    }
  }
  res.lhs = worst;
  res.rhs = 1e-9;
  res.pass = checked > 0 && worst <= 1e-9;
  std::ostringstream os;
  os << "max (|subdifferential| - bound) over " << checked
     << " contact nodes: " << worst;
  res.detail = os.str();
  return res;
}

CheckResult alexandroff_ratio(const TriMesh& mesh, const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0x17);
  CheckResult res{"alexandroff-ratio"};
  double worst = 0.0;
  for (int k = 0; k < opt.n_alexandroff; ++k) {
    const NodalField f = random_field(mesh, rng, 0.0, 1.0);
    const AlexandroffCheck c = alexandroff_check(mesh, f);
    if (!std::isfinite(c.ratio)) {
      res.detail = "infinite Alexandroff ratio";
      return res;
    }
    worst = std::max(worst, c.ratio);
  }
  res.lhs = worst;
  res.rhs = 100.0;
  res.pass = worst <= 100.0;
  std::ostringstream os;
  os << "max Alexandroff ratio over " << opt.n_alexandroff << " fields: " << worst;
  res.detail = os.str();
  return res;
}

CheckResult envelope_idempotence_minima(const TriMesh& mesh, const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0x28);
  CheckResult res{"envelope-idempotence-minima"};
  double worst_idem = 0.0, worst_min = 0.0, worst_touch = 0.0;
  for (int k = 0; k < opt.n_fields; ++k) {
    const NodalField f = random_field(mesh, rng, -1.0, 1.0);
    const ConvexEnvelopeResult env = convex_envelope(mesh, f);

    const NodalField gamma(mesh, env.envelope);
    const ConvexEnvelopeResult env2 = convex_envelope(mesh, gamma);
    worst_idem =
        std::max(worst_idem, (env2.envelope - env.envelope).cwiseAbs().maxCoeff());

    int argmin = 0;
    f.values.minCoeff(&argmin);
    worst_min =
        std::max(worst_min, std::abs(f.values.minCoeff() - env.envelope.minCoeff()));
    worst_touch =
        std::max(worst_touch, std::abs(f.values[argmin] - env.envelope[argmin]));
  }
  res.lhs = worst_idem;
  res.rhs = std::max(worst_min, worst_touch);
  res.pass = worst_idem <= 1e-10 && worst_min <= 1e-10 && worst_touch <= 1e-10;
  std::ostringstream os;
  os << "max idempotence defect " << worst_idem << ", minima mismatch " << worst_min
     << ", contact gap at the minimizer " << worst_touch;
  res.detail = os.str();
  return res;
}

CheckResult operator_homogeneity(const TriMesh& mesh, const OperatorContext& ctx,
                                 const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0x39);
  CheckResult res{"operator-homogeneity"};
  const InteriorBarrier q = build_interior_barrier(mesh, Vec2::Zero(), 1.0);
  double worst = 0.0;
  auto check_field = [&](const NodalField& w) {
    const Eigen::VectorXd Tw = apply_T_all(ctx, w);
    for (double sigma : {2.0, 5.0}) {
      const NodalField sw(mesh, sigma * w.values);
      const Eigen::VectorXd Tsw = apply_T_all(ctx, sw);
      const double scale = sigma * sigma;
      for (int r = 0; r < ctx.n_interior(); ++r) {
        const double rel = std::abs(Tsw[r] - scale * Tw[r]) /
                           std::max(1.0, std::abs(scale * Tw[r]));
        worst = std::max(worst, rel);
      }
    }
  };
  check_field(q.field);
  for (int k = 0; k < 10; ++k)
    check_field(convexify(mesh, random_field(mesh, rng, -1.0, 1.0)));
  res.lhs = worst;
  res.rhs = 1e-9;
  res.pass = worst <= 1e-9;
  std::ostringstream os;
  os << "max relative homogeneity defect: " << worst;
  res.detail = os.str();
  return res;
}

CheckResult diagonal_monotonicity(const TriMesh& mesh, const OperatorContext& ctx,
                                  const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0x4a);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  CheckResult res{"diagonal-monotonicity"};
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 20; ++k) {
    NodalField f = random_field(mesh, rng, -1.0, 1.0);
    const int node = ctx.interior_node(static_cast<int>(
        rng() % static_cast<std::uint64_t>(ctx.n_interior())));
    const double t = uni(rng);
    const double before = apply_T(ctx, f, node);
    const double s_before = second_difference(f, ctx.stencil, node, 0);
    f.values[node] += t;
    const double after = apply_T(ctx, f, node);
    const double s_after = second_difference(f, ctx.stencil, node, 0);
    worst = std::max(worst, after - before);          // must be <= 0
    if (s_after >= s_before) {
      res.detail = "second difference did not strictly decrease";
      return res;
    }
  }
  res.lhs = worst;
  res.rhs = 0.0;
  res.pass = worst <= 1e-12;
  std::ostringstream os;
  os << "max operator increase under a raised diagonal value: " << worst;
  res.detail = os.str();
  return res;
}

CheckResult continuous_dependence(const TriMesh& mesh, const OperatorContext& ctx,
                                  const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0x5b);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  CheckResult res{"continuous-dependence"};
  SolverConfig cfg;
  cfg.bisection_tol = 1e-10;
  cfg.nodal_tol = 1e-11;
  double worst = 0.0;
  for (int k = 0; k < opt.n_problem_pairs; ++k) {
    const double a = uni(rng), b = 2.0 * uni(rng), c = 0.2 + 2.0 * uni(rng);
    const double phi = 6.28318530717958648 * uni(rng);
    const Vec2 dir(std::cos(phi), std::sin(phi));
    const double gx = uni(rng) - 0.5, gy = uni(rng) - 0.5, gc = uni(rng);

    Problem p2;
    p2.domain = DomainSpec::unit_disk();
    p2.f = [a, b, dir](const Vec2& x) { return a + b * std::pow(dir.dot(x), 2); };
    p2.g = [gx, gy, gc](const Vec2& x) { return gx * x.x() + gy * x.y() + gc; };
    Problem p1 = p2;
    p1.f = [f2 = p2.f, c](const Vec2& x) { return f2(x) + c; };

    const NodalField u1 = solve(ctx, p1, cfg).first;
    const NodalField u2 = solve(ctx, p2, cfg).first;
    const NodalField diff(mesh, u1.values - u2.values);
    const double lhs = std::max(0.0, -diff.values.minCoeff());
    const ConvexEnvelopeResult env = convex_envelope(mesh, diff);
    double sum = 0.0;
    for (int node : env.contact) {
      const Vec2& x = mesh.nodes[node];
      sum += std::pow(std::sqrt(p1.f(x)) - std::sqrt(p2.f(x)), 2);
    }
    const double rhs = ctx.delta * std::sqrt(sum);
    if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
  }
  res.lhs = worst;
  res.rhs = 100.0;
  res.pass = worst <= 100.0;
  std::ostringstream os;
  os << "max measured continuous-dependence constant: " << worst;
  res.detail = os.str();
  return res;
}

CheckResult contact_sdd(const TriMesh& mesh, const OperatorContext& ctx,
                        const VerifyOptions& opt) {
  std::mt19937_64 rng(opt.seed ^ 0x6c);
  CheckResult res{"contact-second-difference"};
  int violations = 0;
  for (int k = 0; k < opt.n_fields; ++k) {
    const NodalField f = random_field(mesh, rng, -1.0, 1.0);
    const ConvexEnvelopeResult env = convex_envelope(mesh, f);
    violations += static_cast<int>(contact_second_difference_check(ctx, f, env).size());
  }
  res.lhs = violations;
  res.rhs = 0.0;
  res.pass = violations == 0;
  std::ostringstream os;
  os << violations << " violations over " << opt.n_fields << " fields";
  res.detail = os.str();
  return res;
}

}  // namespace

std::vector<CheckResult> run_property_suites(const VerifyOptions& opt) {
  const TriMesh mesh = generate_mesh(DomainSpec::unit_disk(), opt.mesh_h, opt.seed);
  const OperatorContext ctx = OperatorContext::build(mesh, opt.delta, opt.theta);

  std::vector<CheckResult> out;
  out.push_back(convexity_equivalence(mesh, ctx, opt));
  out.push_back(comparison_principle(mesh, ctx, opt));
  out.push_back(operator_concavity(mesh, ctx, opt));
  out.push_back(matrix_concavity(opt));
  out.push_back(hyper_rectangle_volume(opt));
  out.push_back(subdifferential_bound(mesh, ctx, opt));
  out.push_back(alexandroff_ratio(mesh, opt));
  out.push_back(envelope_idempotence_minima(mesh, opt));
  out.push_back(operator_homogeneity(mesh, ctx, opt));
  out.push_back(diagonal_monotonicity(mesh, ctx, opt));
  out.push_back(continuous_dependence(mesh, ctx, opt));
  out.push_back(contact_sdd(mesh, ctx, opt));
  return out;
}

bool all_passed(const std::vector<CheckResult>& checks) {
  for (const CheckResult& c : checks)
    if (!c.pass) return false;
  return true;
}

void write_checks_json(const std::vector<CheckResult>& checks, std::ostream& out) {
  nlohmann::json j = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["lhs"] = c.lhs;
    e["rhs"] = c.rhs;
    e["ratio"] = c.ratio;
    e["detail"] = c.detail;
    j.push_back(std::move(e));
  }
  out << j.dump(2) << '\n';
}

}  // namespace twoscale
