#include "twoscale/solver.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace twoscale {

namespace {

// The node value enters the second difference twice through the center and
// possibly through the endpoint interpolation when an endpoint falls inside
// the node's own star. Freezing everything else, each second difference is
// affine in t = field[i]:  s_d(t) = (base_d - drop_d * t) / delta_hat^2,
// with drop_d = 2 - (barycentric weight of i at both endpoints) > 0.
struct NodeCoefficients {
  double dh2 = 0.0;
  std::vector<double> base, drop;
};

void extract_coefficients(const OperatorContext& ctx, const NodalField& field,
                          int node, NodeCoefficients& co) {
  const SecondDiffStencil& st = ctx.stencil;
  const int r = st.row_of_node[node];
  if (r < 0) throw std::logic_error("node_solve: node is not interior");
  const double dh = st.delta_hat[r];
  co.dh2 = dh * dh;
  co.base.resize(st.n_dirs);
  co.drop.resize(st.n_dirs);
  for (int d = 0; d < st.n_dirs; ++d) {
    double base = 0.0, lam = 0.0;
    for (const PointLocation* loc : {&st.loc_plus(r, d), &st.loc_minus(r, d)}) {
      const auto& tri = ctx.mesh->elements[loc->element];
      for (int k = 0; k < 3; ++k) {
        if (tri[k] == node)
          lam += loc->barycentric[k];
        else
          base += loc->barycentric[k] * field.values[tri[k]];
      }
    }
    co.base[d] = base;
    co.drop[d] = 2.0 - lam;
  }
}

double bracket_value(const OrthoTupleSet& tuples, const NodeCoefficients& co, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& tuple : tuples.tuples) {
    double prod = 1.0, neg = 0.0;
    for (int idx : tuple) {
      const double s = (co.base[idx] - co.drop[idx] * t) / co.dh2;
      prod *= std::max(s, 0.0);
      neg += std::max(-s, 0.0);
    }
    best = std::min(best, prod - neg);
  }
  return best;
}

double solve_scalar(const OperatorContext& ctx, const NodeCoefficients& co, int node,
                    double t0, double f_i, const SolverConfig& cfg) {
  const auto phi = [&](double t) { return bracket_value(ctx.tuples, co, t); };
  const double r0 = phi(t0) - f_i;
  if (std::abs(r0) <= cfg.bisection_tol) return t0;

  // Geometric bracket growth in the direction of the root; phi is
  // strictly decreasing in t.
  double lo, hi;
  double step = std::max(0.25 * co.dh2, 1e-9 * (1.0 + std::abs(t0)));
  if (r0 > 0.0) {  // operator too large: raise the value
    lo = t0;
    hi = t0 + step;
    int grow = 0;
    while (phi(hi) - f_i > 0.0) {
      lo = hi;
      step *= 2.0;
      hi = t0 + step;
      if (++grow > 60)
        throw NodeSolveDivergence("node_solve: no sign change after 60 doublings", node);
    }
  } else {
    hi = t0;
    lo = t0 - step;
    int grow = 0;
    while (phi(lo) - f_i < 0.0) {
      hi = lo;
      step *= 2.0;
      lo = t0 - step;
      if (++grow > 60)
        throw NodeSolveDivergence("node_solve: no sign change after 60 doublings", node);
    }
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < cfg.max_bisection; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = phi(mid) - f_i;
    if (std::abs(r) <= cfg.bisection_tol) return mid;
    if (r > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16 * (1.0 + std::abs(mid))) break;
  }
  return mid;
}

}  // namespace

NodalField initial_guess(const OperatorContext& ctx, const Problem& problem) {
  const TriMesh& mesh = *ctx.mesh;
  const InteriorBarrier barrier = build_interior_barrier(
      mesh, problem.domain.enclosing_center(), problem.domain.enclosing_radius());

  double fmax = 0.0;
  for (int r = 0; r < ctx.n_interior(); ++r)
    fmax = std::max(fmax, problem.f(mesh.nodes[ctx.interior_node(r)]));
  const double sigma = std::pow(fmax, 1.0 / ctx.dim) + 1.0;

  // Affine lift of g: least-squares plane through the boundary values,
  // shifted down to a minorant at the boundary nodes.
  const int nb = static_cast<int>(mesh.boundary_loop.size());
  Eigen::MatrixXd A(nb, 3);
  Eigen::VectorXd rhs(nb);
  for (int k = 0; k < nb; ++k) {
    const Vec2& p = mesh.nodes[mesh.boundary_loop[k]];
    A(k, 0) = p.x();
    A(k, 1) = p.y();
    A(k, 2) = 1.0;
    rhs[k] = problem.g(p);
  }
  Eigen::Vector3d plane = A.colPivHouseholderQr().solve(rhs);
  double overshoot = 0.0;
  for (int k = 0; k < nb; ++k) overshoot = std::max(overshoot, (A.row(k) * plane)(0) - rhs[k]);
  plane[2] -= overshoot;

  NodalField w(mesh);
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    const Vec2& p = mesh.nodes[i];
    if (mesh.node_on_boundary[i])
      w.values[i] = problem.g(p);
    else
      w.values[i] =
          sigma * barrier.field.values[i] + plane[0] * p.x() + plane[1] * p.y() + plane[2];
  }
  return w;
}

double node_solve(const OperatorContext& ctx, const NodalField& field, int node,
                  double f_i, const SolverConfig& cfg) {
  thread_local NodeCoefficients co;
  extract_coefficients(ctx, field, node, co);
  return solve_scalar(ctx, co, node, field.values[node], f_i, cfg);
}

std::pair<NodalField, SolveReport> solve(const OperatorContext& ctx,
                                         const Problem& problem,
                                         const SolverConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  const TriMesh& mesh = *ctx.mesh;
  if (!(cfg.nodal_tol > 0.0) || !(cfg.bisection_tol > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");

  const int n = ctx.n_interior();
  Eigen::VectorXd f_nodes(n);
  for (int r = 0; r < n; ++r) {
    f_nodes[r] = problem.f(mesh.nodes[ctx.interior_node(r)]);
    if (f_nodes[r] < 0.0)
      throw std::invalid_argument("problem: f is negative at an interior node");
  }

  NodalField u = (cfg.init == SolverConfig::Init::Custom && cfg.initial != nullptr)
                     ? *cfg.initial
                     : initial_guess(ctx, problem);
  for (int i : mesh.boundary_loop) u.values[i] = problem.g(mesh.nodes[i]);

  SolveReport rep;
  rep.mode = (cfg.mode == SolverConfig::Mode::Jacobi) ? "jacobi" : "gauss-seidel";
  rep.order = (cfg.order == SolverConfig::Order::RedBlack) ? "red-black" : "lexicographic";

  // Sweep order over stencil rows.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (cfg.order == SolverConfig::Order::RedBlack) {
    std::vector<int> rb;
    rb.reserve(n);
    for (int r = 0; r < n; r += 2) rb.push_back(r);
    for (int r = 1; r < n; r += 2) rb.push_back(r);
    order = std::move(rb);
  }

  const double residual_target = 10.0 * cfg.bisection_tol;
  NodeCoefficients co;
  Eigen::VectorXd jacobi_next;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double max_update = 0.0;
    if (cfg.mode == SolverConfig::Mode::Jacobi) {
      jacobi_next.resize(n);
      for (int r : order) {
        const int node = ctx.interior_node(r);
        extract_coefficients(ctx, u, node, co);
        jacobi_next[r] = solve_scalar(ctx, co, node, u.values[node], f_nodes[r], cfg);
      }
      for (int r = 0; r < n; ++r) {
        const int node = ctx.interior_node(r);
        max_update = std::max(max_update, std::abs(jacobi_next[r] - u.values[node]));
        rep.min_update = std::min(rep.min_update, jacobi_next[r] - u.values[node]);
        u.values[node] = jacobi_next[r];
      }
    } else {
      for (int r : order) {
        const int node = ctx.interior_node(r);
        extract_coefficients(ctx, u, node, co);
        const double t = solve_scalar(ctx, co, node, u.values[node], f_nodes[r], cfg);
        max_update = std::max(max_update, std::abs(t - u.values[node]));
        rep.min_update = std::min(rep.min_update, t - u.values[node]);
        u.values[node] = t;
      }
    }

    const double residual = (apply_T_all(ctx, u) - f_nodes).cwiseAbs().maxCoeff();
    rep.residual_history.push_back(residual);
    rep.sweeps = sweep;
    rep.final_max_update = max_update;
    rep.final_residual = residual;
    if (max_update < cfg.nodal_tol && residual <= residual_target) {
      rep.converged = true;
      break;
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (!rep.converged)
    throw SolveFailure("solve: sweep limit reached before convergence", rep);
  return {std::move(u), std::move(rep)};
}

}  // namespace twoscale
