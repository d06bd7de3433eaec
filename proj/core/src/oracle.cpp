#include "dsfs/oracle.hpp"

#include <chrono>
#include <limits>

#include "dsfs/errors.hpp"
#include "dsfs/lp.hpp"
#include "dsfs/parallel.hpp"

namespace dsfs::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_point(const CompactModel& model, const Eigen::VectorXd& p0) {
  if (p0.size() != model.steps)
    throw DimensionMismatch("oracle: p0 length != model steps");
  if (!p0.allFinite()) throw InvalidConfig("oracle: p0 has non-finite entries");
}

}  // namespace

std::string to_string(Label l) {
  switch (l) {
    case Label::Infeasible:
      return "infeasible";
    case Label::Feasible:
      return "feasible";
    case Label::Unlabeled:
      return "unlabeled";
  }
  return "unknown";
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::None:
      return "none";
    case Provenance::OracleLp:
      return "oracle";
    case Provenance::GeometricMember:
      return "hull";
  }
  return "unknown";
}

CheckResult check_feasible(const CompactModel& model,
                           const Eigen::VectorXd& p0,
                           const CheckOptions& opts) {
  check_point(model, p0);
  if (!(opts.label_tol >= 0))
    throw InvalidConfig("oracle: label_tol must be nonnegative");

  const int cols = model.ders * model.steps;
  const int k = static_cast<int>(model.w.rows());
  const int t = model.steps;
  const int n = cols + k + 2 * t;  // p, u, s+, s-

  lp::Problem prob;
  prob.objective = Eigen::VectorXd::Zero(n);
  prob.objective.segment(cols, k + 2 * t).setOnes();
  prob.lower = Eigen::VectorXd::Zero(n);
  prob.lower.head(cols).setConstant(-kInf);
  prob.upper = Eigen::VectorXd::Constant(n, kInf);

  prob.ineq_a = Eigen::MatrixXd::Zero(k, n);
  prob.ineq_a.leftCols(cols) = model.w;
  prob.ineq_a.block(0, cols, k, k) = -Eigen::MatrixXd::Identity(k, k);
  prob.ineq_b = model.z;

  prob.eq_a = Eigen::MatrixXd::Zero(t, n);
  prob.eq_a.leftCols(cols) = model.d;
  prob.eq_a.block(0, cols + k, t, t) = Eigen::MatrixXd::Identity(t, t);
  prob.eq_a.block(0, cols + k + t, t, t) = -Eigen::MatrixXd::Identity(t, t);
  prob.eq_b = p0 - model.b;

  const auto sol = lp::solve(prob);
  if (sol.status != lp::Status::Optimal)
    throw SolverFailure("oracle: slack program did not come back optimal");

  CheckResult res;
  res.slack_objective = sol.objective;
  if (sol.objective <= opts.label_tol) {
    res.label = Label::Feasible;
    res.witness = sol.x.head(cols);
  } else {
    res.label = Label::Infeasible;
  }
  return res;
}

BoundingBox bounding_box(const CompactModel& model, double inflation) {
  if (!(inflation >= 0) || !std::isfinite(inflation))
    throw InvalidConfig("oracle: inflation must be finite and nonnegative");

  const int cols = model.ders * model.steps;
  const int t = model.steps;

  lp::Problem prob;
  prob.objective = Eigen::VectorXd::Zero(cols);
  prob.lower = Eigen::VectorXd::Constant(cols, -kInf);
  prob.upper = Eigen::VectorXd::Constant(cols, kInf);
  prob.ineq_a = model.w;
  prob.ineq_b = model.z;
  prob.eq_a.resize(0, cols);
  prob.eq_b.resize(0);

  BoundingBox box;
  box.inflation = inflation;
  box.raw_lo.resize(t);
  box.raw_hi.resize(t);
  for (int i = 0; i < t; ++i) {
    prob.objective = model.d.row(i);
    const auto lo = lp::solve(prob);
    prob.objective = -model.d.row(i);
    const auto hi = lp::solve(prob);
    if (lo.status != lp::Status::Optimal || hi.status != lp::Status::Optimal)
      throw SolverFailure("oracle: bounding box extreme LP failed");
    box.raw_lo[i] = model.b[i] + lo.objective;
    box.raw_hi[i] = model.b[i] - hi.objective;
  }
  const Eigen::VectorXd pad = inflation * (box.raw_hi - box.raw_lo);
  box.lo = box.raw_lo - pad;
  box.hi = box.raw_hi + pad;
  return box;
}

std::vector<SamplePoint> label_batch(const CompactModel& model,
                                     const std::vector<Eigen::VectorXd>& points,
                                     const CheckOptions& opts, int threads,
                                     std::vector<double>* seconds) {
  for (const auto& q : points) check_point(model, q);
  std::vector<SamplePoint> out(points.size());
  if (seconds) seconds->assign(points.size(), 0.0);
  parallel_for(points.size(), threads, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = check_feasible(model, points[i], opts);
    const auto t1 = std::chrono::steady_clock::now();
    out[i].p0 = points[i];
    out[i].label = res.label;
    out[i].provenance = Provenance::OracleLp;
    if (seconds)
      (*seconds)[i] = std::chrono::duration<double>(t1 - t0).count();
  });
  return out;
}

}  // namespace dsfs::oracle
