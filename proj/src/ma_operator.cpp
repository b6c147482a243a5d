#include "twoscale/ma_operator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace twoscale {

namespace {

constexpr double kConvexityTol = -1e-10;

// Second differences along every stencil direction at one node.
void all_second_differences(const OperatorContext& ctx, const NodalField& field,
                            int node, std::vector<double>& sdd) {
  const SecondDiffStencil& st = ctx.stencil;
  const int r = st.row_of_node[node];
  if (r < 0) throw std::logic_error("operator: node is not interior");
  const double dh2 = st.delta_hat[r] * st.delta_hat[r];
  const double center = 2.0 * field.values[node];
  sdd.resize(st.n_dirs);
  for (int d = 0; d < st.n_dirs; ++d) {
    const double wp = evaluate(field, st.loc_plus(r, d));
    const double wm = evaluate(field, st.loc_minus(r, d));
    sdd[d] = (wp + wm - center) / dh2;
  }
}

double tuple_bracket(const OrthoTupleSet& tuples, int t, const std::vector<double>& sdd) {
  double prod = 1.0;
  double neg = 0.0;
  for (int idx : tuples.tuples[t]) {
    const double s = sdd[idx];
    prod *= std::max(s, 0.0);
    neg += std::max(-s, 0.0);
  }
  return prod - neg;
}

}  // namespace

OperatorContext OperatorContext::build(const TriMesh& mesh, double delta, double theta) {
  OperatorContext ctx;
  ctx.mesh = &mesh;
  ctx.tuples = build_ortho_tuples(build_direction_set(theta));
  ctx.stencil = build_stencils(mesh, ctx.tuples.dirs, delta);
  ctx.delta = delta;
  ctx.theta = theta;
  return ctx;
}

OperatorContext OperatorContext::with_tuples(const TriMesh& mesh, OrthoTupleSet tuples,
                                             double delta) {
  OperatorContext ctx;
  ctx.mesh = &mesh;
  ctx.tuples = std::move(tuples);
  ctx.stencil = build_stencils(mesh, ctx.tuples.dirs, delta);
  ctx.delta = delta;
  ctx.theta = ctx.tuples.theta;
  return ctx;
}

double apply_T(const OperatorContext& ctx, const NodalField& field, int node,
               int* argmin_tuple) {
  thread_local std::vector<double> sdd;
  all_second_differences(ctx, field, node, sdd);
  double best = std::numeric_limits<double>::infinity();
  int best_t = 0;
  for (int t = 0; t < ctx.tuples.size(); ++t) {
    const double b = tuple_bracket(ctx.tuples, t, sdd);
    if (b < best) {
      best = b;
      best_t = t;
    }
  }
  if (argmin_tuple != nullptr) *argmin_tuple = best_t;
  return best;
}

Eigen::VectorXd apply_T_all(const OperatorContext& ctx, const NodalField& field) {
  Eigen::VectorXd out(ctx.n_interior());
  for (int r = 0; r < ctx.n_interior(); ++r)
    out[r] = apply_T(ctx, field, ctx.interior_node(r));
  return out;
}

ConvexityReport is_discretely_convex(const OperatorContext& ctx, const NodalField& field) {
  ConvexityReport rep;
  std::vector<double> sdd;
  for (int r = 0; r < ctx.n_interior(); ++r) {
    const int node = ctx.interior_node(r);
    all_second_differences(ctx, field, node, sdd);
    for (int d = 0; d < ctx.stencil.n_dirs; ++d) {
      if (sdd[d] < kConvexityTol) rep.violations.emplace_back(node, d);
    }
  }
  rep.convex = rep.violations.empty();
  return rep;
}

double product_form_T(const OperatorContext& ctx, const NodalField& field, int node) {
  std::vector<double> sdd;
  all_second_differences(ctx, field, node, sdd);
  for (double s : sdd) {
    if (s < kConvexityTol)
      throw std::logic_error("product_form_T: field is not discretely convex at node");
  }
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < ctx.tuples.size(); ++t) {
    double prod = 1.0;
    for (int idx : ctx.tuples.tuples[t]) prod *= sdd[idx];
    best = std::min(best, prod);
  }
  return best;
}

double concavity_gap(const OperatorContext& ctx, const NodalField& u,
                     const NodalField& w, int node) {
  std::vector<double> su, sw;
  all_second_differences(ctx, u, node, su);
  all_second_differences(ctx, w, node, sw);
  for (int d = 0; d < ctx.stencil.n_dirs; ++d) {
    if (su[d] < kConvexityTol || sw[d] < kConvexityTol)
      throw std::logic_error("concavity_gap: a field is not discretely convex at node");
  }
  NodalField sum(*u.mesh, u.values + w.values);
  const double inv_d = 1.0 / ctx.dim;
  const double tu = std::max(apply_T(ctx, u, node), 0.0);
  const double tw = std::max(apply_T(ctx, w, node), 0.0);
  const double ts = std::max(apply_T(ctx, sum, node), 0.0);
  return std::pow(ts, inv_d) - std::pow(tu, inv_d) - std::pow(tw, inv_d);
}

void write_operator_csv(const OperatorContext& ctx, const NodalField& field,
                        std::ostream& out) {
  out << "node,T_value,argmin_tuple_index\n";
  out.precision(17);
  for (int r = 0; r < ctx.n_interior(); ++r) {
    const int node = ctx.interior_node(r);
    int arg = 0;
    const double v = apply_T(ctx, field, node, &arg);
    out << node << ',' << v << ',' << arg << '\n';
  }
}

}  // namespace twoscale
