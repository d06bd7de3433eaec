#include "dsfs/inner_set.hpp"

#include <limits>

#include "dsfs/errors.hpp"
#include "dsfs/lp.hpp"

namespace dsfs::inner_set {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_query(const InnerSet& s, const Eigen::VectorXd& q) {
  if (q.size() != s.dim)
    throw DimensionMismatch("inner set: query dimension mismatch");
  if (!q.allFinite())
    throw InvalidConfig("inner set: query has non-finite entries");
}

// Membership of q in conv(box ∪ vertices). With the box present the witness
// point w = mu * (box point) is modeled through per-coordinate bounds
// mu*lo <= w <= mu*hi, which is exact for mu >= 0.
bool member_of(const Eigen::VectorXd& box_lo, const Eigen::VectorXd& box_hi,
               bool box_present, const std::vector<Eigen::VectorXd>& verts,
               const Eigen::VectorXd& q) {
  const int t = static_cast<int>(q.size());
  const int k = static_cast<int>(verts.size());
  if (!box_present && k == 0) return false;

  const int n = box_present ? 1 + k + t : k;  // [mu, lambda, w] or [lambda]
  lp::Problem prob;
  prob.objective = Eigen::VectorXd::Zero(n);
  prob.lower = Eigen::VectorXd::Zero(n);
  prob.upper = Eigen::VectorXd::Constant(n, kInf);

  prob.eq_a = Eigen::MatrixXd::Zero(1 + t, n);
  prob.eq_b = Eigen::VectorXd::Zero(1 + t);
  // Weights sum to one.
  const int lam0 = box_present ? 1 : 0;
  if (box_present) prob.eq_a(0, 0) = 1.0;
  for (int j = 0; j < k; ++j) prob.eq_a(0, lam0 + j) = 1.0;
  prob.eq_b[0] = 1.0;
  // Combination reaches q.
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < k; ++j) prob.eq_a(1 + i, lam0 + j) = verts[j][i];
    prob.eq_b[1 + i] = q[i];
  }

  if (box_present) {
    const int w0 = 1 + k;
    for (int i = 0; i < t; ++i) prob.eq_a(1 + i, w0 + i) = 1.0;
    prob.lower.segment(w0, t).setConstant(-kInf);
    // w - mu*hi <= 0 and mu*lo - w <= 0.
    prob.ineq_a = Eigen::MatrixXd::Zero(2 * t, n);
    prob.ineq_b = Eigen::VectorXd::Zero(2 * t);
    for (int i = 0; i < t; ++i) {
      prob.ineq_a(i, w0 + i) = 1.0;
      prob.ineq_a(i, 0) = -box_hi[i];
      prob.ineq_a(t + i, w0 + i) = -1.0;
      prob.ineq_a(t + i, 0) = box_lo[i];
    }
  } else {
    prob.ineq_a.resize(0, n);
    prob.ineq_b.resize(0);
  }

  return lp::solve_feasibility(prob).feasible;
}

}  // namespace

InnerSet make_empty(int dim) {
  if (dim < 1) throw InvalidConfig("inner set: dimension must be positive");
  InnerSet s;
  s.dim = dim;
  return s;
}

InnerSet from_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != hi.size() || lo.size() == 0)
    throw DimensionMismatch("inner set: box bound sizes disagree");
  if (!lo.allFinite() || !hi.allFinite() || (lo.array() > hi.array()).any())
    throw InvalidConfig("inner set: malformed box");
  InnerSet s;
  s.dim = static_cast<int>(lo.size());
  s.box_present = true;
  s.box_lo = lo;
  s.box_hi = hi;
  return s;
}

bool is_member(const InnerSet& s, const Eigen::VectorXd& q) {
  check_query(s, q);
  return member_of(s.box_lo, s.box_hi, s.box_present, s.vertices, q);
}

int grow(InnerSet& s, const std::vector<Eigen::VectorXd>& points) {
  for (const auto& q : points) check_query(s, q);
  int added = 0;
  for (const auto& q : points) {
    if (is_member(s, q)) continue;
    s.vertices.push_back(q);
    ++added;
  }
  if (added > 0) ++s.generation;
  return added;
}

int prune(InnerSet& s) {
  int removed = 0;
  std::size_t i = 0;
  while (i < s.vertices.size()) {
    std::vector<Eigen::VectorXd> rest;
    rest.reserve(s.vertices.size() - 1);
    for (std::size_t j = 0; j < s.vertices.size(); ++j)
      if (j != i) rest.push_back(s.vertices[j]);
    if (member_of(s.box_lo, s.box_hi, s.box_present, rest, s.vertices[i])) {
      s.vertices.erase(s.vertices.begin() + static_cast<long>(i));
      ++removed;
    } else {
      ++i;
    }
  }
  return removed;
}

}  // namespace dsfs::inner_set
