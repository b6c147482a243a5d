#include "twoscale/pwl_field.hpp"

#include <fstream>
#include <stdexcept>

namespace twoscale {

NodalField interpolate(const TriMesh& mesh,
                       const std::function<double(const Vec2&)>& u) {
  NodalField f(mesh);
  for (int i = 0; i < mesh.n_nodes(); ++i) f.values[i] = u(mesh.nodes[i]);
  return f;
}

double evaluate(const NodalField& field, const Vec2& p, int hint_element) {
  return evaluate(field, locate_point(*field.mesh, p, hint_element));
}

SecondDiffStencil build_stencils(const TriMesh& mesh, const DirectionSet& dirs,
                                 double delta) {
  return build_stencils(mesh, dirs.dirs, delta);
}

SecondDiffStencil build_stencils(const TriMesh& mesh, const std::vector<Vec2>& dirs,
                                 double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  SecondDiffStencil st;
  st.delta = delta;
  st.n_dirs = static_cast<int>(dirs.size());
  st.interior = mesh.interior_nodes();
  st.row_of_node.assign(mesh.n_nodes(), -1);
  for (int r = 0; r < st.n_rows(); ++r) st.row_of_node[st.interior[r]] = r;
  st.delta_hat.resize(st.n_rows());
  st.plus.resize(static_cast<size_t>(st.n_rows()) * st.n_dirs);
  st.minus.resize(st.plus.size());

  int hint = -1;
  for (int r = 0; r < st.n_rows(); ++r) {
    const int i = st.interior[r];
    const Vec2& x = mesh.nodes[i];
    const double dist = boundary_distance(mesh, x);
    if (!(dist > 0.0))
      throw std::logic_error("build_stencils: interior node with zero boundary distance");
    const double dh = std::min(delta, dist);
    st.delta_hat[r] = dh;
    if (hint < 0) hint = mesh.node_elements[i].front();
    for (int d = 0; d < st.n_dirs; ++d) {
      // start each walk from the node's own star; endpoints are delta_hat away
      hint = mesh.node_elements[i].front();
      PointLocation lp = locate_point(mesh, x + dh * dirs[d], hint);
      PointLocation lm = locate_point(mesh, x - dh * dirs[d], lp.element);
      st.plus[static_cast<size_t>(r) * st.n_dirs + d] = lp;
      st.minus[static_cast<size_t>(r) * st.n_dirs + d] = lm;
    }
  }
  return st;
}

double second_difference(const NodalField& field, const SecondDiffStencil& stencil,
                         int node, int dir) {
  const int r = stencil.row_of_node[node];
  if (r < 0) throw std::logic_error("second_difference: node is not interior");
  const double dh = stencil.delta_hat[r];
  const double wp = evaluate(field, stencil.loc_plus(r, dir));
  const double wm = evaluate(field, stencil.loc_minus(r, dir));
  return (wp - 2.0 * field.values[node] + wm) / (dh * dh);
}

void write_field_csv(const NodalField& field, std::ostream& out) {
  out << "node_index,x,y,value\n";
  out.precision(17);
  const TriMesh& mesh = *field.mesh;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    out << i << ',' << mesh.nodes[i].x() << ',' << mesh.nodes[i].y() << ','
        << field.values[i] << '\n';
  }
}

void write_field_csv(const NodalField& field, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open field dump for writing: " + path);
  write_field_csv(field, f);
}

}  // namespace twoscale
