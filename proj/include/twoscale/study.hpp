#pragma once

#include "twoscale/problems.hpp"

#include <cmath>
#include <optional>

namespace twoscale {

/// Power-law couplings delta = c_delta h^gamma_delta, theta = c_theta
/// h^gamma_theta, the knob the rate theorems turn.
struct CouplingRule {
  double c_delta = 1.0, gamma_delta = 0.5;
  double c_theta = 1.0, gamma_theta = 0.5;

  double delta(double h) const { return c_delta * std::pow(h, gamma_delta); }
  double theta(double h) const { return c_theta * std::pow(h, gamma_theta); }

  /// Parses "c*h^g" (also "h^g", "c*h", "c"); throws std::invalid_argument.
  static double parse_power_law(const std::string& text, double& c, double& gamma);
  static CouplingRule parse(const std::string& delta_rule, const std::string& theta_rule);

  std::string delta_rule_text() const;
  std::string theta_rule_text() const;
};

struct RateRow {
  double h = 0.0, delta = 0.0, theta = 0.0;
  double err_linf_nodes = std::nan("");
  double err_linf_centroids = std::nan("");
  double consistency_interior = std::nan("");
  double consistency_boundary = std::nan("");
  double residual = std::nan("");
  int sweeps = 0;
  double seconds = 0.0;
  bool solver_converged = true;
  double boundary_layer_error = std::nan("");  // max over the delta-layer of |u_eps - I_h u|
};

/// Study output: rows sorted by decreasing h plus run metadata. EOC values
/// are derived between consecutive rows.
struct RateReport {
  std::string problem;
  std::string delta_rule, theta_rule;
  std::uint64_t seed = 0;
  std::string git_revision = "unknown";
  std::vector<RateRow> rows;

  static std::vector<double> eoc(const std::vector<double>& h,
                                 const std::vector<double>& e);
  std::vector<double> eoc_nodes() const;
  std::vector<double> eoc_consistency_interior() const;

  /// log(e_first / e_last) / log(h_first / h_last) over rows with finite e.
  static double aggregate_eoc(const std::vector<double>& h, const std::vector<double>& e);
  double aggregate_eoc_nodes() const;
  double aggregate_eoc_consistency_interior() const;
};

/// Interior/boundary-layer consistency error of T[I_h u] against det D^2 u
/// over a mesh sequence. With exact_axes_tuple the tuple set is the single
/// coordinate pair (no angular error); theta is recorded as 0.
RateReport consistency_study(const TestProblem& tp, const std::vector<double>& h_list,
                             const CouplingRule& coupling, bool exact_axes_tuple = false,
                             std::uint64_t mesh_seed = 20240811u);

/// Solves the problem on each level and reports nodal and centroid sup
/// errors; solver failures leave a row with the partial data.
RateReport convergence_study(const TestProblem& tp, const std::vector<double>& h_list,
                             const CouplingRule& coupling, const SolverConfig& cfg,
                             std::uint64_t mesh_seed = 20240811u);

/// Deterministic column order:
/// h, delta, theta, err_Linf_nodes, err_Linf_centroids, consistency_interior,
/// consistency_boundary, residual, sweeps, seconds.
void emit_report_csv(const RateReport& report, std::ostream& out);
void emit_report_csv(const RateReport& report, const std::string& path);

/// JSON mirror of the columns plus metadata and the EOC entries; doubles
/// round-trip bitwise (NaN maps to null).
void emit_report_json(const RateReport& report, std::ostream& out);
void emit_report_json(const RateReport& report, const std::string& path);
RateReport read_report_json(std::istream& in);
RateReport read_report_json(const std::string& path);

/// Best-effort current git revision ("unknown" outside a repository).
std::string detect_git_revision();

}  // namespace twoscale
