#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dsfs::inner_set {

// Convex inner approximation of the flexibility set, stored as the convex
// hull of an optional certified box and a list of member vertices. Because
// the flexibility set is convex, any convex combination of known members is
// itself a member, so points inside this hull can be labeled feasible
// without consulting the oracle.
struct InnerSet {
  int dim = 0;
  bool box_present = false;
  Eigen::VectorXd box_lo, box_hi;
  std::vector<Eigen::VectorXd> vertices;
  long generation = 0;  // bumped whenever the hull grows
};

InnerSet make_empty(int dim);

// Seeds the set with a box, typically the certified robust inner box.
InnerSet from_box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

// Hull membership via a small feasibility LP over convex-combination
// weights: q = mu w + sum_j lambda_j v_j with w in the box, mu + sum = 1.
// Boundary points count as members within the LP feasibility tolerance.
bool is_member(const InnerSet& s, const Eigen::VectorXd& q);

// Adds the points that are not already members, in order; skipped members
// do not bump the generation. Returns how many points were added.
int grow(InnerSet& s, const std::vector<Eigen::VectorXd>& points);

// Removes vertices that lie in the hull of the remaining set, scanning in
// index order. The represented hull is unchanged. Returns the removal count.
int prune(InnerSet& s);

}  // namespace dsfs::inner_set
