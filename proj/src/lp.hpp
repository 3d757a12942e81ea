#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace mpctune {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimization LP:  min c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lb <= x <= ub.
// Infinite bounds are permitted in lb/ub; everything else must be finite.
struct LpProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::VectorXd lb;
  Eigen::VectorXd ub;
  std::vector<std::string> var_names;  // optional; used for diagnostics and extraction
  std::vector<std::string> row_names;  // optional; eq rows then ub rows

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_eq() const { return static_cast<int>(b_eq.size()); }
  int num_ub() const { return static_cast<int>(b_ub.size()); }
  void validate() const;  // throws InputError
  int var_index(const std::string& name) const;  // -1 if absent
};

enum class LpStatus { Optimal, Infeasible, Unbounded };
const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

struct SimplexOptions {
  int max_iterations = 0;  // 0 -> 50 * (num_vars + num_rows)
  int refactor_every = 64;
  double opt_tol = 1e-9;
  double feas_tol = 1e-7;
  int stall_limit = 1000;  // stalled iterations before switching to Bland's rule
};

// Revised primal simplex with bounded variables, two phases, and Bland's rule
// engaged after a stall. Deterministic: fixed tie-breaking by lowest index.
LpSolution solve(const LpProblem& p, const SimplexOptions& options = {});

// Dump in fixed-format (CPLEX-style) LP text for external cross-checking.
void write_lp_file(const LpProblem& p, std::ostream& os);

}  // namespace mpctune
