#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "dsfs/active_loop.hpp"
#include "dsfs/mlp.hpp"
#include "dsfs/network.hpp"
#include "dsfs/oracle.hpp"

namespace dsfs::evaluation {

struct Timing {
  double classify_per_sample_s = 0.0;
  double oracle_per_sample_s = 0.0;
};

// Confusion-matrix scorecard with feasible as the positive class. f1 is
// defined as 0 when the classifier finds no positives at all.
struct EvalReport {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;
  Timing timing;
};

// Derives the scalar metrics from raw counts (all counts must be >= 0).
EvalReport from_counts(long tp, long fp, long fn, long tn);

// Draws `count` points uniformly from the inflated bounding box and labels
// each with the exact oracle. The stream is namespaced away from training
// pools, so a test set never collides with a pool drawn from the same seed.
std::vector<oracle::SamplePoint> make_test_set(const CompactModel& model,
                                               int count, std::uint64_t seed,
                                               double inflation = 0.1,
                                               double label_tol = 1e-6,
                                               int threads = 1);

// Scores a classifier on an oracle-labeled set. Classification wall time is
// measured over the batch; the oracle timing field stays 0 here (see
// timing_benchmark).
EvalReport score(const mlp::Params& params,
                 const std::vector<oracle::SamplePoint>& test);

struct GridRow {
  double x = 0.0, y = 0.0;
  double posterior = 0.0, uncertainty = 0.0;
  int oracle = 0;
};

// Rasterizes a 2-D slice of the flexibility set: posterior, uncertainty and
// exact oracle label at every cell center of a resolution x resolution grid
// over the inflated box. `dims` picks the two profile coordinates to sweep;
// the remaining coordinates sit at the box center. Rows come out row-major
// with dims.first as the outer loop.
std::vector<GridRow> heatmap_grid(const mlp::Params& params,
                                  const CompactModel& model,
                                  std::pair<int, int> dims, int resolution,
                                  double inflation = 0.1,
                                  double label_tol = 1e-6);

struct WindowRow {
  int window = 0;
  int epoch = 0;  // 0 is the pre-training snapshot
  double f1_warm = 0.0;
  double f1_cold = 0.0;
};

struct RollingResult {
  std::vector<WindowRow> rows;
  // Final parameters of the warm chain, one per window. Entry 0 is the
  // scratch-trained model that seeds the chain.
  std::vector<mlp::Params> checkpoints;
};

// Runs the active loop over a sequence of planning windows. Window 0 trains
// from scratch; every later window both continues from the previous
// checkpoint (warm) and retrains from scratch (cold ablation) on the same
// budget, scored per epoch against a fresh oracle-labeled set for that
// window's model.
RollingResult rolling_horizon(
    const std::function<CompactModel(int)>& model_factory, int windows,
    const active_loop::ActiveConfig& cfg, int eval_count);

// One uncertainty scenario: the feeder with loads and interval-resource
// bounds jittered by independent uniform factors in [1 - level, 1 + level].
struct PerturbedScenario {
  double level = 0.0;
  CompactModel model;
  std::uint64_t seed = 0;
};

// Builds a perturbed scenario from a feeder description. Level 0 reproduces
// the nominal model bit for bit. Throws EmptyInterior when the jitter
// empties the operating set.
PerturbedScenario perturb_scenario(const FeederSpec& feeder,
                                   const std::vector<DerSpec>& ders,
                                   double level, std::uint64_t seed);

struct LevelRow {
  double level = 0.0;
  double f1 = 0.0, precision = 0.0, recall = 0.0;
  int scenarios_retried = 0;
};

// Stress-tests fixed classifier parameters against rising injection
// uncertainty: per level, perturb the feeder, relabel a fresh test set under
// the perturbed model, and score the nominal parameters. Scenarios whose
// operating set comes up empty are redrawn up to 10 times; a level that
// exhausts the budget reports NaN metrics.
std::vector<LevelRow> robustness_sweep(const FeederSpec& feeder,
                                       const std::vector<DerSpec>& ders,
                                       const std::vector<double>& levels,
                                       int per_level_count,
                                       const mlp::Params& params,
                                       std::uint64_t seed, int threads = 1);

struct TimingReport {
  double classify_per_sample_s = 0.0;
  double oracle_per_sample_s = 0.0;
  double ratio = 0.0;  // oracle / classify
};

// Compares per-sample wall clock of batch classification against the exact
// oracle on points drawn from the inflated box. Classification is timed as
// the best of five passes over the full batch; the oracle over a subset of
// at most 200 points.
TimingReport timing_benchmark(const mlp::Params& params,
                              const CompactModel& model, int batch_size,
                              std::uint64_t seed = 0);

}  // namespace dsfs::evaluation
