#include "twoscale/study.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <sstream>

namespace twoscale {

using nlohmann::json;

double CouplingRule::parse_power_law(const std::string& text, double& c, double& gamma) {
  // Accepted forms: "c*h^g", "h^g", "c*h", "h", "c".
  c = 1.0;
  gamma = 0.0;
  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(), ::isspace), t.end());
  if (t.empty()) throw std::invalid_argument("empty coupling rule");
  const size_t star = t.find('*');
  std::string rest = t;
  if (star != std::string::npos) {
    c = std::stod(t.substr(0, star));
    rest = t.substr(star + 1);
  }
  if (rest.empty()) throw std::invalid_argument("bad coupling rule: " + text);
  if (rest[0] == 'h') {
    gamma = 1.0;
    if (rest.size() > 1) {
      if (rest[1] != '^') throw std::invalid_argument("bad coupling rule: " + text);
      gamma = std::stod(rest.substr(2));
    }
  } else {
    if (star != std::string::npos)
      throw std::invalid_argument("bad coupling rule: " + text);
    c = std::stod(rest);
    gamma = 0.0;
  }
  return c;
}

CouplingRule CouplingRule::parse(const std::string& delta_rule,
                                 const std::string& theta_rule) {
  CouplingRule r;
  parse_power_law(delta_rule, r.c_delta, r.gamma_delta);
  parse_power_law(theta_rule, r.c_theta, r.gamma_theta);
  return r;
}

namespace {
std::string power_law_text(double c, double gamma) {
  std::ostringstream os;
  os.precision(17);
  os << c << "*h^" << gamma;
  return os.str();
}
}  // namespace

std::string CouplingRule::delta_rule_text() const {
  return power_law_text(c_delta, gamma_delta);
}
std::string CouplingRule::theta_rule_text() const {
  return power_law_text(c_theta, gamma_theta);
}

std::vector<double> RateReport::eoc(const std::vector<double>& h,
                                    const std::vector<double>& e) {
  std::vector<double> out;
  for (size_t k = 0; k + 1 < h.size(); ++k) {
    if (std::isfinite(e[k]) && std::isfinite(e[k + 1]) && e[k] > 0 && e[k + 1] > 0)
      out.push_back(std::log(e[k] / e[k + 1]) / std::log(h[k] / h[k + 1]));
    else
      out.push_back(std::nan(""));
  }
  return out;
}

std::vector<double> RateReport::eoc_nodes() const {
  std::vector<double> h, e;
  for (const RateRow& r : rows) {
    h.push_back(r.h);
    e.push_back(r.err_linf_nodes);
  }
  return eoc(h, e);
}

std::vector<double> RateReport::eoc_consistency_interior() const {
  std::vector<double> h, e;
  for (const RateRow& r : rows) {
    h.push_back(r.h);
    e.push_back(r.consistency_interior);
  }
  return eoc(h, e);
}

double RateReport::aggregate_eoc(const std::vector<double>& h,
                                 const std::vector<double>& e) {
  int first = -1, last = -1;
  for (int k = 0; k < static_cast<int>(h.size()); ++k) {
    if (!std::isfinite(e[k]) || e[k] <= 0.0) continue;
    if (first < 0) first = k;
    last = k;
  }
  if (first < 0 || first == last) return std::nan("");
  return std::log(e[first] / e[last]) / std::log(h[first] / h[last]);
}

double RateReport::aggregate_eoc_nodes() const {
  std::vector<double> h, e;
  for (const RateRow& r : rows) {
    h.push_back(r.h);
    e.push_back(r.err_linf_nodes);
  }
  return aggregate_eoc(h, e);
}

double RateReport::aggregate_eoc_consistency_interior() const {
  std::vector<double> h, e;
  for (const RateRow& r : rows) {
    h.push_back(r.h);
    e.push_back(r.consistency_interior);
  }
  return aggregate_eoc(h, e);
}

RateReport consistency_study(const TestProblem& tp, const std::vector<double>& h_list,
                             const CouplingRule& coupling, bool exact_axes_tuple,
                             std::uint64_t mesh_seed) {
  if (!tp.problem.exact) throw std::invalid_argument("consistency study needs exact u");
  RateReport report;
  report.problem = tp.name;
  report.delta_rule = coupling.delta_rule_text();
  report.theta_rule = exact_axes_tuple ? "exact-axes" : coupling.theta_rule_text();
  report.seed = mesh_seed;
  report.git_revision = detect_git_revision();

  std::vector<double> hs = h_list;
  std::sort(hs.begin(), hs.end(), std::greater<>());
  for (double h : hs) {
    const auto t0 = std::chrono::steady_clock::now();
    const TriMesh mesh = generate_mesh(tp.problem.domain, h, mesh_seed);
    const double delta = coupling.delta(h);
    const double theta = coupling.theta(h);
    const OperatorContext ctx =
        exact_axes_tuple ? OperatorContext::with_tuples(mesh, axes_tuple_set(), delta)
                         : OperatorContext::build(mesh, delta, theta);
    const NodalField uh = interpolate(mesh, tp.problem.exact);
    const Eigen::VectorXd Tu = apply_T_all(ctx, uh);
    const DeltaInteriorSets sets = classify_delta_interior(mesh, delta);

    RateRow row;
    row.h = mesh.h;
    row.delta = delta;
    row.theta = exact_axes_tuple ? 0.0 : theta;
    double interior = 0.0, layer = 0.0;
    for (int node : sets.delta_interior) {
      const int r = ctx.stencil.row_of_node[node];
      interior = std::max(interior, std::abs(tp.exact_det(mesh.nodes[node]) - Tu[r]));
    }
    for (int node : sets.boundary_layer) {
      const int r = ctx.stencil.row_of_node[node];
      layer = std::max(layer, std::abs(tp.exact_det(mesh.nodes[node]) - Tu[r]));
    }
    row.consistency_interior = interior;
    row.consistency_boundary = layer;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.rows.push_back(row);
  }
  return report;
}

RateReport convergence_study(const TestProblem& tp, const std::vector<double>& h_list,
                             const CouplingRule& coupling, const SolverConfig& cfg,
                             std::uint64_t mesh_seed) {
  if (!tp.problem.exact) throw std::invalid_argument("convergence study needs exact u");
  RateReport report;
  report.problem = tp.name;
  report.delta_rule = coupling.delta_rule_text();
  report.theta_rule = coupling.theta_rule_text();
  report.seed = mesh_seed;
  report.git_revision = detect_git_revision();

  std::vector<double> hs = h_list;
  std::sort(hs.begin(), hs.end(), std::greater<>());
  for (double h : hs) {
    const auto t0 = std::chrono::steady_clock::now();
    const TriMesh mesh = generate_mesh(tp.problem.domain, h, mesh_seed);
    const double delta = coupling.delta(h);
    const double theta = coupling.theta(h);
    const OperatorContext ctx = OperatorContext::build(mesh, delta, theta);

    RateRow row;
    row.h = mesh.h;
    row.delta = delta;
    row.theta = theta;

    NodalField u(mesh);
    SolveReport srep;
    try {
      std::tie(u, srep) = solve(ctx, tp.problem, cfg);
    } catch (const SolveFailure& fail) {
      row.solver_converged = false;
      row.residual = fail.report.final_residual;
      row.sweeps = fail.report.sweeps;
      row.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      report.rows.push_back(row);
      continue;
    }

    double err_nodes = 0.0;
    for (int i = 0; i < mesh.n_nodes(); ++i)
      err_nodes = std::max(err_nodes,
                           std::abs(u.values[i] - tp.problem.exact(mesh.nodes[i])));
    double err_cent = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      const Vec2 c = mesh.element_centroid(e);
      const auto& tri = mesh.elements[e];
      const double uc = (u.values[tri[0]] + u.values[tri[1]] + u.values[tri[2]]) / 3.0;
      err_cent = std::max(err_cent, std::abs(uc - tp.problem.exact(c)));
    }
    const DeltaInteriorSets sets = classify_delta_interior(mesh, delta);
    double layer_err = 0.0;
    for (int node : sets.boundary_layer)
      layer_err = std::max(layer_err,
                           std::abs(u.values[node] - tp.problem.exact(mesh.nodes[node])));

    row.err_linf_nodes = err_nodes;
    row.err_linf_centroids = err_cent;
    row.residual = srep.final_residual;
    row.sweeps = srep.sweeps;
    row.boundary_layer_error = layer_err;
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.rows.push_back(row);
  }
  return report;
}

namespace {
void csv_cell(std::ostream& out, double v) {
  if (std::isnan(v))
    out << "nan";
  else
    out << v;
}
}  // namespace

void emit_report_csv(const RateReport& report, std::ostream& out) {
  out.precision(17);
  out << "h,delta,theta,err_Linf_nodes,err_Linf_centroids,consistency_interior,"
         "consistency_boundary,residual,sweeps,seconds\n";
  for (const RateRow& r : report.rows) {
    out << r.h << ',' << r.delta << ',' << r.theta << ',';
    csv_cell(out, r.err_linf_nodes);
    out << ',';
    csv_cell(out, r.err_linf_centroids);
    out << ',';
    csv_cell(out, r.consistency_interior);
    out << ',';
    csv_cell(out, r.consistency_boundary);
    out << ',';
    csv_cell(out, r.residual);
    out << ',' << r.sweeps << ',' << r.seconds << '\n';
  }
}

void emit_report_csv(const RateReport& report, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open report for writing: " + path);
  emit_report_csv(report, f);
}

void emit_report_json(const RateReport& report, std::ostream& out) {
  json j;
  j["problem"] = report.problem;
  j["coupling"] = {{"delta_rule", report.delta_rule}, {"theta_rule", report.theta_rule}};
  j["seed"] = report.seed;
  j["git_revision"] = report.git_revision;
  j["columns"] = {"h", "delta", "theta", "err_Linf_nodes", "err_Linf_centroids",
                  "consistency_interior", "consistency_boundary", "residual",
                  "sweeps", "seconds"};
  j["rows"] = json::array();
  for (const RateRow& r : report.rows) {
    json row;
    row["h"] = r.h;
    row["delta"] = r.delta;
    row["theta"] = r.theta;
    row["err_Linf_nodes"] = r.err_linf_nodes;
    row["err_Linf_centroids"] = r.err_linf_centroids;
    row["consistency_interior"] = r.consistency_interior;
    row["consistency_boundary"] = r.consistency_boundary;
    row["residual"] = r.residual;
    row["sweeps"] = r.sweeps;
    row["seconds"] = r.seconds;
    row["solver_converged"] = r.solver_converged;
    row["boundary_layer_error"] = r.boundary_layer_error;
    j["rows"].push_back(std::move(row));
  }
  j["eoc"] = {{"err_Linf_nodes", report.eoc_nodes()},
              {"consistency_interior", report.eoc_consistency_interior()}};
  out << j.dump(2) << '\n';
}

void emit_report_json(const RateReport& report, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open report for writing: " + path);
  emit_report_json(report, f);
}

namespace {
double json_double(const json& v) {
  return v.is_null() ? std::nan("") : v.get<double>();
}
}  // namespace

RateReport read_report_json(std::istream& in) {
  json j;
  in >> j;
  RateReport report;
  report.problem = j.at("problem").get<std::string>();
  report.delta_rule = j.at("coupling").at("delta_rule").get<std::string>();
  report.theta_rule = j.at("coupling").at("theta_rule").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.git_revision = j.at("git_revision").get<std::string>();
  for (const json& row : j.at("rows")) {
    RateRow r;
    r.h = row.at("h").get<double>();
    r.delta = row.at("delta").get<double>();
    r.theta = row.at("theta").get<double>();
    r.err_linf_nodes = json_double(row.at("err_Linf_nodes"));
    r.err_linf_centroids = json_double(row.at("err_Linf_centroids"));
    r.consistency_interior = json_double(row.at("consistency_interior"));
    r.consistency_boundary = json_double(row.at("consistency_boundary"));
    r.residual = json_double(row.at("residual"));
    r.sweeps = row.at("sweeps").get<int>();
    r.seconds = row.at("seconds").get<double>();
    r.solver_converged = row.at("solver_converged").get<bool>();
    r.boundary_layer_error = json_double(row.at("boundary_layer_error"));
    report.rows.push_back(r);
  }
  return report;
}

RateReport read_report_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open report: " + path);
  return read_report_json(f);
}

std::string detect_git_revision() {
  std::ifstream head(".git/HEAD");
  if (!head) return "unknown";
  std::string line;
  std::getline(head, line);
  if (line.rfind("ref: ", 0) == 0) {
    std::ifstream ref(".git/" + line.substr(5));
    if (!ref) return "unknown";
    std::string rev;
    std::getline(ref, rev);
    return rev.empty() ? "unknown" : rev;
  }
  return line.empty() ? "unknown" : line;
}

}  // namespace twoscale
