#pragma once

#include "twoscale/convex_envelope.hpp"
#include "twoscale/study.hpp"

#include <iosfwd>

namespace twoscale {

struct CheckResult {
  std::string name;
  bool pass = false;
  double lhs = std::nan("");
  double rhs = std::nan("");
  double ratio = std::nan("");
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 424242u;
  double mesh_h = 0.125;
  double delta = 0.2;
  double theta = 0.5;
  int n_fields = 50;
  int n_alexandroff = 100;
  int n_matrix_pairs = 100;
  int n_rectangles = 20;
  int n_problem_pairs = 10;
  int mc_samples = 1000000;
};

/// Randomized property suites: discrete convexity equivalence, comparison
/// principle, operator and determinant concavity, hyper-rectangle volume,
/// subdifferential bound, Alexandroff ratio, envelope idempotence/minima,
/// operator homogeneity, diagonal monotonicity, continuous dependence.
std::vector<CheckResult> run_property_suites(const VerifyOptions& opt = {});

bool all_passed(const std::vector<CheckResult>& checks);

/// One JSON object per check with lhs/rhs/ratio and detail.
void write_checks_json(const std::vector<CheckResult>& checks, std::ostream& out);

}  // namespace twoscale
