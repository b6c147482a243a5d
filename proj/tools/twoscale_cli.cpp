// Command-line front end: mesh generation, single solves, consistency and
// convergence-rate studies, and the randomized verification suites.

#include "twoscale/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace twoscale;
namespace fs = std::filesystem;

DomainSpec domain_from_name(const std::string& name, double a, double b) {
  if (name == "disk") return DomainSpec::unit_disk();
  if (name == "ellipse") return DomainSpec::ellipse(a, b);
  throw CLI::ValidationError("--domain", "expected disk or ellipse");
}

std::vector<double> parse_h_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const size_t slash = tok.find('/');
    if (slash != std::string::npos)
      out.push_back(std::stod(tok.substr(0, slash)) / std::stod(tok.substr(slash + 1)));
    else
      out.push_back(std::stod(tok));
  }
  if (out.empty()) throw CLI::ValidationError("--h-list", "no mesh sizes given");
  return out;
}

void ensure_dir(const std::string& path) {
  if (!path.empty()) fs::create_directories(path);
}

int run_mesh(const std::string& domain_name, double a, double b, double h,
             std::uint64_t seed, const std::string& out) {
  const DomainSpec domain = domain_from_name(domain_name, a, b);
  const TriMesh mesh = generate_mesh(domain, h, seed);
  if (out.empty()) {
    write_mesh(mesh, std::cout);
  } else {
    write_mesh(mesh, out);
    std::cout << "wrote " << out << " (" << mesh.n_nodes() << " nodes, "
              << mesh.n_elements() << " elements, h = " << mesh.h << ")\n";
  }
  return 0;
}

int run_solve(const std::string& domain_name, double a, double b,
              const std::string& problem_name, double h, const std::string& delta_rule,
              const std::string& theta_rule, double tol, std::uint64_t seed,
              const std::string& out) {
  TestProblem tp = find_problem(problem_name);
  tp.problem.domain = domain_from_name(domain_name, a, b);

  const CouplingRule coupling = CouplingRule::parse(delta_rule, theta_rule);
  const double delta = coupling.delta(h);
  const double theta = coupling.theta(h);
  const TriMesh mesh = generate_mesh(tp.problem.domain, h, seed);
  const OperatorContext ctx = OperatorContext::build(mesh, delta, theta);

  SolverConfig cfg;
  cfg.bisection_tol = tol;
  cfg.nodal_tol = 0.1 * tol;
  auto [u, rep] = solve(ctx, tp.problem, cfg);

  ensure_dir(out);
  const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  write_field_csv(u, (dir / "solution.csv").string());

  nlohmann::json j;
  j["problem"] = tp.name;
  j["epsilon"] = {{"h", mesh.h}, {"delta", delta}, {"theta", theta}};
  j["iterations"] = rep.sweeps;
  j["residual_history"] = rep.residual_history;
  j["final_residual"] = rep.final_residual;
  j["final_max_update"] = rep.final_max_update;
  j["mode"] = rep.mode;
  j["order"] = rep.order;
  j["seconds"] = rep.seconds;
  j["converged"] = rep.converged;
  j["git_revision"] = detect_git_revision();
  std::ofstream rf(dir / "report.json");
  rf << j.dump(2) << '\n';

  std::cout << "solved " << tp.name << " at h = " << mesh.h << ": " << rep.sweeps
            << " sweeps, residual " << rep.final_residual << "\n";
  return 0;
}

int emit_study(const RateReport& report, const std::string& out) {
  ensure_dir(out);
  const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  emit_report_csv(report, (dir / "rates.csv").string());
  emit_report_json(report, (dir / "rates.json").string());

  std::cout << "h, delta, theta, err_nodes, consistency_interior\n";
  for (const RateRow& r : report.rows) {
    std::cout << r.h << ", " << r.delta << ", " << r.theta << ", " << r.err_linf_nodes
              << ", " << r.consistency_interior << (r.solver_converged ? "" : "  [failed]")
              << "\n";
  }
  bool ok = true;
  for (const RateRow& r : report.rows) ok = ok && r.solver_converged;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-scale Monge-Ampere solver and verification harness"};
  app.require_subcommand(1);

  std::string domain_name = "disk", problem_name = "quadratic", out;
  std::string delta_rule = "h^0.5", theta_rule = "h^0.5", h_list_text = "1/8,1/16,1/32";
  double a = 1.0, b = 0.5, h = 0.125, tol = 1e-9;
  std::uint64_t seed = 20240811u;
  bool axes = false;

  CLI::App* mesh_cmd = app.add_subcommand("mesh", "generate a mesh file");
  mesh_cmd->add_option("--domain", domain_name, "disk | ellipse");
  mesh_cmd->add_option("--a", a, "ellipse semi-axis a");
  mesh_cmd->add_option("--b", b, "ellipse semi-axis b");
  mesh_cmd->add_option("--h", h, "target mesh size")->required();
  mesh_cmd->add_option("--seed", seed, "lattice jitter seed");
  mesh_cmd->add_option("--out", out, "output path (stdout when empty)");

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one problem instance");
  solve_cmd->add_option("--domain", domain_name, "disk | ellipse");
  solve_cmd->add_option("--a", a, "ellipse semi-axis a");
  solve_cmd->add_option("--b", b, "ellipse semi-axis b");
  solve_cmd->add_option("--problem", problem_name, "catalog problem name")->required();
  solve_cmd->add_option("--h", h, "target mesh size")->required();
  solve_cmd->add_option("--delta", delta_rule, "coarse scale: value or c*h^g rule");
  solve_cmd->add_option("--theta", theta_rule, "angular scale: value or c*h^g rule");
  solve_cmd->add_option("--tol", tol, "bisection tolerance");
  solve_cmd->add_option("--seed", seed, "mesh seed");
  solve_cmd->add_option("--out", out, "output directory");

  CLI::App* cons_cmd = app.add_subcommand("consistency", "operator consistency study");
  cons_cmd->add_option("--problem", problem_name, "catalog problem name")->required();
  cons_cmd->add_option("--h-list", h_list_text, "comma-separated mesh sizes");
  cons_cmd->add_option("--delta-rule", delta_rule, "c*h^g");
  cons_cmd->add_option("--theta-rule", theta_rule, "c*h^g");
  cons_cmd->add_flag("--axes", axes, "use the exact coordinate-axes tuple");
  cons_cmd->add_option("--seed", seed, "mesh seed");
  cons_cmd->add_option("--out", out, "output directory");

  CLI::App* rates_cmd = app.add_subcommand("rates", "solver convergence-rate study");
  rates_cmd->add_option("--problem", problem_name, "catalog problem name")->required();
  rates_cmd->add_option("--h-list", h_list_text, "comma-separated mesh sizes");
  rates_cmd->add_option("--delta-rule", delta_rule, "c*h^g");
  rates_cmd->add_option("--theta-rule", theta_rule, "c*h^g");
  rates_cmd->add_option("--tol", tol, "bisection tolerance");
  rates_cmd->add_option("--seed", seed, "mesh seed");
  rates_cmd->add_option("--out", out, "output directory");

  CLI::App* verify_cmd = app.add_subcommand("verify", "run all property suites");
  verify_cmd->add_option("--seed", seed, "randomization seed");
  verify_cmd->add_option("--out", out, "output directory for checks.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mesh_cmd->parsed()) return run_mesh(domain_name, a, b, h, seed, out);
    if (solve_cmd->parsed())
      return run_solve(domain_name, a, b, problem_name, h, delta_rule, theta_rule, tol,
                       seed, out);
    if (cons_cmd->parsed()) {
      const TestProblem tp = find_problem(problem_name);
      const CouplingRule coupling = CouplingRule::parse(delta_rule, theta_rule);
      return emit_study(
          consistency_study(tp, parse_h_list(h_list_text), coupling, axes, seed), out);
    }
    if (rates_cmd->parsed()) {
      const TestProblem tp = find_problem(problem_name);
      const CouplingRule coupling = CouplingRule::parse(delta_rule, theta_rule);
      SolverConfig cfg;
      cfg.bisection_tol = tol;
      cfg.nodal_tol = 0.1 * tol;
      return emit_study(
          convergence_study(tp, parse_h_list(h_list_text), coupling, cfg, seed), out);
    }
    if (verify_cmd->parsed()) {
      VerifyOptions opt;
      opt.seed = seed;
      const std::vector<CheckResult> checks = run_property_suites(opt);
      for (const CheckResult& c : checks)
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail
                  << "\n";
      if (!out.empty()) {
        ensure_dir(out);
        std::ofstream f(fs::path(out) / "checks.json");
        write_checks_json(checks, f);
      }
      return all_passed(checks) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
