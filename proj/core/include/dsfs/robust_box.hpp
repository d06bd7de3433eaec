#pragma once

#include <Eigen/Dense>

#include "dsfs/network.hpp"

namespace dsfs::robust_box {

struct BoxOptions {
  double box_eps = 1e-8;  // degeneracy threshold on the total radius
};

// An axis-aligned box [p0_minus, p0_plus] inside the flexibility set,
// certified by an affine recourse policy: for every xi in [-1, 1]^T the
// schedule p(xi) = response xi + offset is operable and realizes the profile
// center + radius .* xi. Inner-ness is therefore constructive, not sampled.
struct InnerBoxResult {
  Eigen::VectorXd p0_minus, p0_plus;
  double objective = 0.0;  // sum of the box edge lengths, 1'(p0_plus - p0_minus)
  bool degenerate = false;
  Eigen::MatrixXd response;  // (ders*steps) x T
  Eigen::VectorXd offset;    // ders*steps
  Eigen::VectorXd center;    // T
  Eigen::VectorXd radius;    // T
};

// Widest certified box via one LP over (c, r, E, f, L):
//   maximize 1'r
//   D E = diag(r),  D f = c - b,
//   L >= W E, L >= -W E (elementwise),  L 1 + W f <= z,  r >= 0.
// Substituting p(xi) = E xi + f shows every profile c + r .* xi with
// xi in [-1,1]^T is realizable. Throws InfeasibleModel when the model has no
// operable schedule at all; a collapsed optimum (1'r <= box_eps) is reported
// with degenerate = true rather than thrown.
InnerBoxResult solve_inner_box(const CompactModel& model,
                               const BoxOptions& opts = {});

}  // namespace dsfs::robust_box
