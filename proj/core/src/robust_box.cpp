#include "dsfs/robust_box.hpp"

#include <limits>

#include "dsfs/errors.hpp"
#include "dsfs/lp.hpp"

namespace dsfs::robust_box {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

InnerBoxResult solve_inner_box(const CompactModel& model,
                               const BoxOptions& opts) {
  if (!(opts.box_eps >= 0))
    throw InvalidConfig("robust box: box_eps must be nonnegative");

  const int t = model.steps;
  const int cols = model.ders * model.steps;
  const int k = static_cast<int>(model.w.rows());

  // Variable layout: [c (t) | r (t) | E (cols*t, xi-column major) |
  //                   f (cols) | L (k*t, xi-column major)].
  const int off_c = 0;
  const int off_r = t;
  const int off_e = 2 * t;
  const int off_f = off_e + cols * t;
  const int off_l = off_f + cols;
  const int n = off_l + k * t;

  lp::Problem prob;
  prob.objective = Eigen::VectorXd::Zero(n);
  prob.objective.segment(off_r, t).setConstant(-1.0);  // maximize 1'r
  prob.lower = Eigen::VectorXd::Constant(n, -kInf);
  prob.upper = Eigen::VectorXd::Constant(n, kInf);
  prob.lower.segment(off_r, t).setZero();
  prob.lower.segment(off_l, k * t).setZero();

  const int eq_rows = t * t + t;
  prob.eq_a = Eigen::MatrixXd::Zero(eq_rows, n);
  prob.eq_b = Eigen::VectorXd::Zero(eq_rows);
  int row = 0;
  // D e_i = r_i unit_i, one block of t rows per xi-coordinate i.
  for (int i = 0; i < t; ++i) {
    for (int tt = 0; tt < t; ++tt, ++row) {
      prob.eq_a.block(row, off_e + i * cols, 1, cols) = model.d.row(tt);
      if (tt == i) prob.eq_a(row, off_r + i) = -1.0;
    }
  }
  // D f = c - b.
  for (int tt = 0; tt < t; ++tt, ++row) {
    prob.eq_a.block(row, off_f, 1, cols) = model.d.row(tt);
    prob.eq_a(row, off_c + tt) = -1.0;
    prob.eq_b[row] = -model.b[tt];
  }

  const int ineq_rows = 2 * k * t + k;
  prob.ineq_a = Eigen::MatrixXd::Zero(ineq_rows, n);
  prob.ineq_b = Eigen::VectorXd::Zero(ineq_rows);
  row = 0;
  // +/- (W e_i)_kk <= L(kk, i).
  for (int i = 0; i < t; ++i) {
    for (int kk = 0; kk < k; ++kk, ++row) {
      prob.ineq_a.block(row, off_e + i * cols, 1, cols) = model.w.row(kk);
      prob.ineq_a(row, off_l + i * k + kk) = -1.0;
    }
  }
  for (int i = 0; i < t; ++i) {
    for (int kk = 0; kk < k; ++kk, ++row) {
      prob.ineq_a.block(row, off_e + i * cols, 1, cols) = -model.w.row(kk);
      prob.ineq_a(row, off_l + i * k + kk) = -1.0;
    }
  }
  // L 1 + W f <= z.
  for (int kk = 0; kk < k; ++kk, ++row) {
    prob.ineq_a.block(row, off_f, 1, cols) = model.w.row(kk);
    for (int i = 0; i < t; ++i) prob.ineq_a(row, off_l + i * k + kk) = 1.0;
    prob.ineq_b[row] = model.z[kk];
  }

  const auto sol = lp::solve(prob);
  if (sol.status == lp::Status::Infeasible)
    throw InfeasibleModel("robust box: model admits no operable schedule");
  if (sol.status != lp::Status::Optimal)
    throw SolverFailure("robust box: recourse program came back unbounded");

  InnerBoxResult res;
  res.center = sol.x.segment(off_c, t);
  res.radius = sol.x.segment(off_r, t).cwiseMax(0.0);
  res.response.resize(cols, t);
  for (int i = 0; i < t; ++i)
    res.response.col(i) = sol.x.segment(off_e + i * cols, cols);
  res.offset = sol.x.segment(off_f, cols);
  res.p0_minus = res.center - res.radius;
  res.p0_plus = res.center + res.radius;
  res.objective = 2.0 * res.radius.sum();
  res.degenerate = res.radius.sum() <= opts.box_eps;
  return res;
}

}  // namespace dsfs::robust_box
