#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dsfs/network.hpp"

namespace dsfs::oracle {

enum class Label : int { Infeasible = 0, Feasible = 1, Unlabeled = -1 };

// How a label was produced: by the exact LP or for free from a certified
// inner approximation.
enum class Provenance : int { None = 0, OracleLp = 1, GeometricMember = 2 };

std::string to_string(Label l);
std::string to_string(Provenance p);

struct SamplePoint {
  Eigen::VectorXd p0;
  Label label = Label::Unlabeled;
  Provenance provenance = Provenance::None;
};

struct CheckOptions {
  // A substation profile counts feasible when the slack optimum is at most
  // this; boundary points land on the feasible side.
  double label_tol = 1e-6;
};

struct CheckResult {
  Label label = Label::Infeasible;
  double slack_objective = 0.0;
  // Schedule realizing p0 (within solver tolerance); only set when feasible.
  Eigen::VectorXd witness;
};

// Exact membership test for the flexibility set: minimizes the total
// constraint slack 1'u + 1'(s+ + s-) subject to Wp <= z + u and
// Dp + s+ - s- = p0 - b. The program is always feasible, so the optimum is a
// distance-to-operability measure; zero (within label_tol) means p0 is
// realizable by some operable schedule.
CheckResult check_feasible(const CompactModel& model,
                           const Eigen::VectorXd& p0,
                           const CheckOptions& opts = {});

struct BoundingBox {
  Eigen::VectorXd lo, hi;          // inflated sampling box
  Eigen::VectorXd raw_lo, raw_hi;  // exact per-coordinate projection bounds
  double inflation = 0.0;
};

// Per-coordinate extremes of the flexibility set via 2T LPs, then symmetric
// inflation by `inflation` times the width on each side. The raw box is the
// tightest axis-aligned box containing the set.
BoundingBox bounding_box(const CompactModel& model, double inflation = 0.1);

// Labels every point with the exact oracle. Deterministic for any thread
// count. When `seconds` is non-null it receives one wall-clock duration per
// point, index-aligned.
std::vector<SamplePoint> label_batch(const CompactModel& model,
                                     const std::vector<Eigen::VectorXd>& points,
                                     const CheckOptions& opts = {},
                                     int threads = 1,
                                     std::vector<double>* seconds = nullptr);

}  // namespace dsfs::oracle
