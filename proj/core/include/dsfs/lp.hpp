#pragma once

#include <Eigen/Dense>
#include <string>

namespace dsfs::lp {

// Linear program in the form
//
//   minimize    objective . x
//   subject to  ineq_a x <= ineq_b
//               eq_a   x  = eq_b
//               lower <= x <= upper
//
// Infinite bounds are expressed with +/-infinity sentinels. Either constraint
// block may be empty (0 rows). All matrix and rhs entries must be finite.
struct Problem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd ineq_a;  // may have 0 rows
  Eigen::VectorXd ineq_b;
  Eigen::MatrixXd eq_a;  // may have 0 rows
  Eigen::VectorXd eq_b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int vars() const { return static_cast<int>(objective.size()); }
};

enum class Status { Optimal, Infeasible, Unbounded };

std::string to_string(Status s);

struct Solution {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;       // meaningful for Optimal
  double objective = 0.0;  // meaningful for Optimal
  int iterations = 0;      // simplex pivots across both phases
};

struct Tolerances {
  double feas_tol = 1e-7;   // constraint satisfaction
  double pivot_tol = 1e-9;  // smallest acceptable pivot magnitude
  double opt_tol = 1e-8;    // reduced-cost optimality threshold
  int max_iters = 0;        // per phase; 0 picks a size-based default
};

// Two-phase revised simplex for bounded variables. Dantzig pricing, switching
// to Bland's rule after 5 * (rows + cols) iterations to break cycles. The
// basis inverse is kept explicitly, updated per pivot and refactorized
// periodically. Identical inputs produce identical outputs.
//
// Throws DimensionMismatch / InvalidConfig for malformed problems and
// NumericalFailure when the arithmetic breaks down (iteration cap, singular
// basis, a returned "optimal" point that fails the feasibility check).
Solution solve(const Problem& p, const Tolerances& t = {});

struct FeasibilityResult {
  bool feasible = false;
  Eigen::VectorXd witness;  // a feasible point when feasible
};

// Phase-one only: decides whether the constraint set admits any point.
FeasibilityResult solve_feasibility(const Problem& p,
                                    const Tolerances& t = {});

// Human-readable dump of a problem, one constraint per line. Numbers carry
// full double precision so a dumped problem can be reproduced exactly.
std::string dump_problem(const Problem& p);

}  // namespace dsfs::lp
