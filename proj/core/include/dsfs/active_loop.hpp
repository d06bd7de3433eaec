#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsfs/inner_set.hpp"
#include "dsfs/mlp.hpp"
#include "dsfs/network.hpp"
#include "dsfs/oracle.hpp"
#include "dsfs/rng.hpp"

namespace dsfs::active_loop {

enum class Strategy { Uncertainty, Random };

std::string to_string(Strategy s);

struct ActiveConfig {
  int pool_size = 20000;
  int init_labeled = 100;
  int per_epoch = 10;
  int epochs = 50;
  // Cap on oracle labels across the whole run; hull labels are free and do
  // not count. Negative means unlimited.
  long label_budget = -1;
  std::uint64_t seed = 0;
  bool use_inner_box = true;
  bool use_hull_labeling = true;
  Strategy strategy = Strategy::Uncertainty;
  std::vector<int> hidden = {64, 64, 64, 64};
  mlp::TrainConfig train;     // per-epoch optimizer settings; seed is derived
  double inflation = 0.1;     // sampling box inflation
  double label_tol = 1e-6;    // oracle feasibility tolerance
  int freeze_prefix = 1;      // hidden layers frozen on a warm start
};

struct LoopState {
  CompactModel model;
  oracle::BoundingBox box;  // sampling box; also fixes input normalization
  std::vector<oracle::SamplePoint> pool;     // unlabeled candidates
  std::vector<oracle::SamplePoint> labeled;  // training set, in label order
  inner_set::InnerSet inner;
  mlp::Params params;
  int epoch = 0;
  long oracle_calls = 0;
  long hull_labels = 0;
  double last_mean_loss = 0.0;  // of the most recent epoch's training
  bool box_degenerate = false;  // recorded, not fatal
  std::uint64_t seed = 0;
  SeedStream select_rng{0};  // Random-strategy draws
};

struct HistoryRow {
  int epoch = 0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  long oracle_calls = 0;
  long hull_labels = 0;
  double mean_loss = 0.0;
};

struct RunResult {
  LoopState state;
  // Score of the untrained (fresh or transferred) classifier right after
  // initialization, before the first epoch.
  HistoryRow initial;
  std::vector<HistoryRow> history;  // one row per completed epoch
};

// Draws the static sample pool from the inflated bounding box, seeds the
// inner set (robust box when enabled; a degenerate box is still a certified
// member and is kept, with box_degenerate recorded), builds a fresh
// classifier or transfers `warm` with the first freeze_prefix hidden layers
// frozen, and labels cfg.init_labeled points drawn uniformly from the pool.
// Normalization comes from the sampling box on a fresh start and carries
// over unchanged on a warm start, keeping frozen layers meaningful.
LoopState initialize(const CompactModel& model, const ActiveConfig& cfg,
                     const mlp::Params* warm = nullptr);

// Labels one profile: a hull member costs nothing when hull labeling is on;
// anything else goes to the oracle (counted), and oracle-feasible points
// grow the inner hull for later free labels.
oracle::SamplePoint label_point(LoopState& state, const ActiveConfig& cfg,
                                const Eigen::VectorXd& q);

// One epoch: rank the pool (posterior uncertainty, ties to the lower pool
// index, or uniform draws under Random), label up to cfg.per_epoch selected
// points, move them to the training set, train for cfg.train.steps, and
// prune the hull. Selected points that cannot be labeled (oracle budget
// spent, outside the hull) stay in the pool.
void run_epoch(LoopState& state, const ActiveConfig& cfg);

// Full pipeline: initialize, then up to cfg.epochs epochs. Stops early when
// the pool empties, or when the oracle budget is spent with hull labeling
// off. When eval_set is given, every history row carries F1 / precision /
// recall against it (feasible = positive class).
RunResult run(const CompactModel& model, const ActiveConfig& cfg,
              const mlp::Params* warm = nullptr,
              const std::vector<oracle::SamplePoint>* eval_set = nullptr);

}  // namespace dsfs::active_loop
