#pragma once

#include "twoscale/barrier.hpp"
#include "twoscale/ma_operator.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace twoscale {

/// Dirichlet problem det D^2 u = f in Omega, u = g on the boundary,
/// with f >= 0 and an optional exact solution for error studies.
struct Problem {
  DomainSpec domain;
  std::function<double(const Vec2&)> f;
  std::function<double(const Vec2&)> g;
  std::function<double(const Vec2&)> exact;  // may be empty
  bool degenerate = false;                   // inf f = 0
};

struct SolverConfig {
  double nodal_tol = 1e-10;      // max update per sweep
  double bisection_tol = 1e-9;   // |T - f| at a node solve
  int max_bisection = 200;
  int max_sweeps = 200000;
  enum class Order { Lexicographic, RedBlack };
  Order order = Order::Lexicographic;
  enum class Init { Barrier, Custom };
  Init init = Init::Barrier;
  const NodalField* initial = nullptr;  // used with Init::Custom
  enum class Mode { GaussSeidel, Jacobi };
  Mode mode = Mode::GaussSeidel;  // Jacobi is experimental
};

struct SolveReport {
  int sweeps = 0;
  std::vector<double> residual_history;  // max_i |T[u](x_i) - f(x_i)| per sweep
  double final_residual = 0.0;
  double final_max_update = 0.0;
  double min_update = 0.0;  // most negative single-node update over the run
  double seconds = 0.0;
  std::string mode = "gauss-seidel";
  std::string order = "lexicographic";
  bool converged = false;
};

/// Raised when the sweep limit is exhausted; carries the partial report.
class SolveFailure : public std::runtime_error {
 public:
  SolveFailure(std::string what, SolveReport rep)
      : std::runtime_error(std::move(what)), report(std::move(rep)) {}
  SolveReport report;
};

/// Raised when the scalar bracket cannot be established at a node.
class NodeSolveDivergence : public std::runtime_error {
 public:
  NodeSolveDivergence(std::string what, int node_id)
      : std::runtime_error(std::move(what)), node(node_id) {}
  int node;
};

/// Discrete subsolution start: sigma q_h plus an affine minorant of g,
/// with sigma = (max_i f)^(1/d) + 1, boundary nodes set to g exactly.
/// Operator values of the initializer dominate f, so by the comparison
/// principle it sits below the discrete solution and sweeps move upward.
NodalField initial_guess(const OperatorContext& ctx, const Problem& problem);

/// Root of the non-increasing scalar map t -> T[field with field_i = t](x_i)
/// minus f_i, found by geometric bracket growth and bisection. Returns the
/// updated value; does not modify the field.
double node_solve(const OperatorContext& ctx, const NodalField& field, int node,
                  double f_i, const SolverConfig& cfg);

/// Monotone Perron-type sweep. Boundary values equal g exactly; stops when
/// the max nodal update drops below nodal_tol and the residual below
/// 10 * bisection_tol. Throws SolveFailure after max_sweeps.
std::pair<NodalField, SolveReport> solve(const OperatorContext& ctx,
                                         const Problem& problem,
                                         const SolverConfig& cfg = {});

}  // namespace twoscale
