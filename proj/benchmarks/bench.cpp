// Microbenchmarks for the hot paths: the LP oracle, box solving, hull
// membership and classifier inference/training. Not part of ctest; run the
// binary directly.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <vector>

#include "dsfs/inner_set.hpp"
#include "dsfs/mlp.hpp"
#include "dsfs/network.hpp"
#include "dsfs/oracle.hpp"
#include "dsfs/rng.hpp"
#include "dsfs/robust_box.hpp"

namespace {

using namespace dsfs;

const CompactModel& desk_model() {
  static const CompactModel model = [] {
    auto [feeder, ders] = generate_feeder(42, 12, 18, 2);
    return assemble_compact(feeder, ders);
  }();
  return model;
}

const oracle::BoundingBox& desk_box() {
  static const oracle::BoundingBox box = oracle::bounding_box(desk_model());
  return box;
}

void BM_OracleCheck(benchmark::State& state) {
  const CompactModel& model = desk_model();
  const Eigen::VectorXd center = 0.5 * (desk_box().raw_lo + desk_box().raw_hi);
  for (auto _ : state) {
    auto result = oracle::check_feasible(model, center);
    benchmark::DoNotOptimize(result.slack_objective);
  }
}
BENCHMARK(BM_OracleCheck)->Unit(benchmark::kMillisecond);

void BM_BoundingBox(benchmark::State& state) {
  auto [feeder, ders] = generate_feeder(7, 8, 6, 2);
  const CompactModel model = assemble_compact(feeder, ders);
  for (auto _ : state) {
    auto box = oracle::bounding_box(model);
    benchmark::DoNotOptimize(box.lo);
  }
}
BENCHMARK(BM_BoundingBox)->Unit(benchmark::kMillisecond);

void BM_InnerBox(benchmark::State& state) {
  // The affine-rule LP grows fast with the fleet size; the 12-bus model
  // already takes seconds, so this one stays small.
  auto [feeder, ders] = generate_feeder(7, 8, 6, 2);
  const CompactModel model = assemble_compact(feeder, ders);
  for (auto _ : state) {
    auto box = robust_box::solve_inner_box(model);
    benchmark::DoNotOptimize(box.objective);
  }
}
BENCHMARK(BM_InnerBox)->Unit(benchmark::kMillisecond);

void BM_HullMembership(benchmark::State& state) {
  // Hull over random feasible-box corners; the query sits inside.
  const int vertices = static_cast<int>(state.range(0));
  SeedStream rng(3);
  inner_set::InnerSet set = inner_set::make_empty(2);
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < vertices; ++i) {
    Eigen::VectorXd v(2);
    v << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
    points.push_back(v);
  }
  inner_set::grow(set, points);
  const Eigen::VectorXd query = Eigen::VectorXd::Zero(2);
  for (auto _ : state) {
    bool inside = inner_set::is_member(set, query);
    benchmark::DoNotOptimize(inside);
  }
}
BENCHMARK(BM_HullMembership)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_Posterior(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const mlp::Params params = mlp::init({2, 64, 64, 64, 64, 1}, 5);
  SeedStream rng(9);
  Eigen::MatrixXd x(batch, 2);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x.data()[i] = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    Eigen::VectorXd p = mlp::posterior(params, x);
    benchmark::DoNotOptimize(p);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_Posterior)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_TrainSteps(benchmark::State& state) {
  SeedStream rng(11);
  const int n = 600;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = rng.uniform(-1.0, 1.0);
    x(i, 1) = rng.uniform(-1.0, 1.0);
    y(i) = x.row(i).norm() < 0.8 ? 1.0 : 0.0;
  }
  mlp::TrainConfig cfg;
  cfg.steps = 10;
  for (auto _ : state) {
    mlp::Params params = mlp::init({2, 64, 64, 64, 64, 1}, 5);
    auto trace = mlp::train_epoch(params, x, y, cfg);
    benchmark::DoNotOptimize(trace.mean_loss);
  }
}
BENCHMARK(BM_TrainSteps)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
