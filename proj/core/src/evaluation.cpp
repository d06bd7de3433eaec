#include "dsfs/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "dsfs/errors.hpp"
#include "dsfs/rng.hpp"

namespace dsfs::evaluation {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Eigen::MatrixXd stack_rows(const std::vector<oracle::SamplePoint>& pts) {
  const Eigen::Index cols = pts.front().p0.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(pts.size()), cols);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (pts[static_cast<std::size_t>(i)].p0.size() != cols)
      throw DimensionMismatch("score: ragged test-set profiles");
    x.row(i) = pts[static_cast<std::size_t>(i)].p0.transpose();
  }
  return x;
}

std::vector<Eigen::VectorXd> draw_box_points(const oracle::BoundingBox& box,
                                             int count, std::uint64_t seed) {
  SeedStream rng(seed);
  const Eigen::Index t = box.lo.size();
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(count));
  for (auto& q : pts) {
    q.resize(t);
    for (Eigen::Index j = 0; j < t; ++j)
      q[j] = rng.uniform(box.lo[j], box.hi[j]);
  }
  return pts;
}

}  // namespace

EvalReport from_counts(long tp, long fp, long fn, long tn) {
  if (tp < 0 || fp < 0 || fn < 0 || tn < 0)
    throw InvalidConfig("from_counts: negative confusion count");
  EvalReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.tn = tn;
  const double tpd = static_cast<double>(tp);
  r.precision = tp + fp > 0 ? tpd / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? tpd / static_cast<double>(tp + fn) : 0.0;
  const long f1_den = 2 * tp + fp + fn;
  r.f1 = f1_den > 0 ? 2.0 * tpd / static_cast<double>(f1_den) : 0.0;
  const long total = tp + fp + fn + tn;
  r.accuracy =
      total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total)
                : 0.0;
  return r;
}

std::vector<oracle::SamplePoint> make_test_set(const CompactModel& model,
                                               int count, std::uint64_t seed,
                                               double inflation,
                                               double label_tol, int threads) {
  if (count < 1)
    throw InvalidCount("make_test_set: count must be at least 1");
  if (label_tol < 0.0)
    throw InvalidConfig("make_test_set: negative label tolerance");
  const auto box = oracle::bounding_box(model, inflation);
  const auto pts = draw_box_points(box, count, derive_seed(seed, "test-set"));
  oracle::CheckOptions opts;
  opts.label_tol = label_tol;
  return oracle::label_batch(model, pts, opts, threads);
}

EvalReport score(const mlp::Params& params,
                 const std::vector<oracle::SamplePoint>& test) {
  if (test.empty()) throw EmptyTestSet("score: empty test set");
  for (const auto& s : test)
    if (s.label == oracle::Label::Unlabeled)
      throw InvalidConfig("score: test set contains unlabeled points");

  const Eigen::MatrixXd x = stack_rows(test);
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::VectorXi pred = mlp::classify(params, x);
  const double elapsed = seconds_since(t0);

  long tp = 0, fp = 0, fn = 0, tn = 0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const bool truth =
        test[static_cast<std::size_t>(i)].label == oracle::Label::Feasible;
    const bool hat = pred[i] == 1;
    if (truth && hat)
      ++tp;
    else if (!truth && hat)
      ++fp;
    else if (truth && !hat)
      ++fn;
    else
      ++tn;
  }
  EvalReport r = from_counts(tp, fp, fn, tn);
  r.timing.classify_per_sample_s = elapsed / static_cast<double>(test.size());
  return r;
}

std::vector<GridRow> heatmap_grid(const mlp::Params& params,
                                  const CompactModel& model,
                                  std::pair<int, int> dims, int resolution,
                                  double inflation, double label_tol) {
  if (resolution < 1)
    throw InvalidConfig("heatmap_grid: resolution must be at least 1");
  const int t = model.steps;
  if (dims.first < 0 || dims.first >= t || dims.second < 0 ||
      dims.second >= t || dims.first == dims.second)
    throw InvalidConfig("heatmap_grid: slice dimensions out of range");

  const auto box = oracle::bounding_box(model, inflation);
  const Eigen::VectorXd center = 0.5 * (box.lo + box.hi);
  const auto cell = [&](int dim, int i) {
    return box.lo[dim] +
           (i + 0.5) * (box.hi[dim] - box.lo[dim]) / resolution;
  };

  const int n = resolution * resolution;
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      Eigen::VectorXd q = center;
      q[dims.first] = cell(dims.first, i);
      q[dims.second] = cell(dims.second, j);
      pts.push_back(std::move(q));
    }
  }

  Eigen::MatrixXd x(n, t);
  for (int i = 0; i < n; ++i)
    x.row(i) = pts[static_cast<std::size_t>(i)].transpose();
  const Eigen::VectorXd post = mlp::posterior(params, x);
  const Eigen::VectorXd unc = mlp::uncertainty(post);
  oracle::CheckOptions opts;
  opts.label_tol = label_tol;
  const auto labeled = oracle::label_batch(model, pts, opts);

  std::vector<GridRow> rows(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& r = rows[static_cast<std::size_t>(i)];
    r.x = pts[static_cast<std::size_t>(i)][dims.first];
    r.y = pts[static_cast<std::size_t>(i)][dims.second];
    r.posterior = post[i];
    r.uncertainty = unc[i];
    r.oracle = labeled[static_cast<std::size_t>(i)].label ==
                       oracle::Label::Feasible
                   ? 1
                   : 0;
  }
  return rows;
}

RollingResult rolling_horizon(
    const std::function<CompactModel(int)>& model_factory, int windows,
    const active_loop::ActiveConfig& cfg, int eval_count) {
  if (!model_factory)
    throw InvalidConfig("rolling_horizon: missing model factory");
  if (windows < 1)
    throw InvalidConfig("rolling_horizon: need at least one window");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto f1_track = [](const active_loop::RunResult& rr) {
    std::vector<double> f1;
    f1.reserve(rr.history.size() + 1);
    f1.push_back(rr.initial.f1);
    for (const auto& h : rr.history) f1.push_back(h.f1);
    return f1;
  };

  RollingResult out;
  for (int w = 0; w < windows; ++w) {
    const CompactModel model = model_factory(w);
    auto wcfg = cfg;
    wcfg.seed = derive_seed(cfg.seed, "window", static_cast<std::uint64_t>(w));
    const auto test =
        make_test_set(model, eval_count,
                      derive_seed(cfg.seed, "window-test",
                                  static_cast<std::uint64_t>(w)),
                      cfg.inflation, cfg.label_tol);

    const auto cold = active_loop::run(model, wcfg, nullptr, &test);
    std::vector<double> warm_f1, cold_f1 = f1_track(cold);
    if (w == 0) {
      // The first window has no predecessor; the warm track mirrors it.
      warm_f1 = cold_f1;
      out.checkpoints.push_back(cold.state.params);
    } else {
      const auto warm =
          active_loop::run(model, wcfg, &out.checkpoints.back(), &test);
      warm_f1 = f1_track(warm);
      out.checkpoints.push_back(warm.state.params);
    }

    const std::size_t track = std::max(warm_f1.size(), cold_f1.size());
    for (std::size_t e = 0; e < track; ++e) {
      WindowRow row;
      row.window = w;
      row.epoch = static_cast<int>(e);
      row.f1_warm = e < warm_f1.size() ? warm_f1[e] : nan;
      row.f1_cold = e < cold_f1.size() ? cold_f1[e] : nan;
      out.rows.push_back(row);
    }
  }
  return out;
}

PerturbedScenario perturb_scenario(const FeederSpec& feeder,
                                   const std::vector<DerSpec>& ders,
                                   double level, std::uint64_t seed) {
  if (!(level >= 0.0 && level <= 1.0))
    throw InvalidConfig("perturb_scenario: level must lie in [0, 1]");

  FeederSpec pf = feeder;
  std::vector<DerSpec> pd = ders;
  SeedStream rng(seed);
  for (auto& load : pf.loads)
    for (Eigen::Index t = 0; t < load.size(); ++t)
      load[t] *= rng.uniform(1.0 - level, 1.0 + level);
  for (auto& der : pd) {
    if (der.kind != DerKind::Interval) continue;
    // One factor per step scales both bounds, so the interval stays ordered.
    for (Eigen::Index t = 0; t < der.p_max.size(); ++t) {
      const double f = rng.uniform(1.0 - level, 1.0 + level);
      der.p_min[t] *= f;
      der.p_max[t] *= f;
    }
  }

  PerturbedScenario s;
  s.level = level;
  s.seed = seed;
  s.model = assemble_compact(pf, pd);
  return s;
}

std::vector<LevelRow> robustness_sweep(const FeederSpec& feeder,
                                       const std::vector<DerSpec>& ders,
                                       const std::vector<double>& levels,
                                       int per_level_count,
                                       const mlp::Params& params,
                                       std::uint64_t seed, int threads) {
  for (const double level : levels)
    if (!(level >= 0.0 && level <= 1.0))
      throw InvalidConfig("robustness_sweep: level must lie in [0, 1]");

  constexpr int kRetryBudget = 10;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<LevelRow> rows;
  rows.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    LevelRow row;
    row.level = levels[i];

    bool have = false;
    PerturbedScenario scenario;
    for (int attempt = 0; attempt <= kRetryBudget; ++attempt) {
      try {
        scenario = perturb_scenario(
            feeder, ders, levels[i],
            derive_seed(seed, "perturb",
                        static_cast<std::uint64_t>(i) * 100 +
                            static_cast<std::uint64_t>(attempt)));
        have = true;
        row.scenarios_retried = attempt;
        break;
      } catch (const EmptyInterior&) {
        // Jitter emptied the operating set; redraw with the next salt.
      }
    }
    if (!have) {
      row.scenarios_retried = kRetryBudget;
      row.f1 = row.precision = row.recall = nan;
      rows.push_back(row);
      continue;
    }

    const auto test = make_test_set(
        scenario.model, per_level_count,
        derive_seed(seed, "level", static_cast<std::uint64_t>(i)), 0.1, 1e-6,
        threads);
    const auto rep = score(params, test);
    row.f1 = rep.f1;
    row.precision = rep.precision;
    row.recall = rep.recall;
    rows.push_back(row);
  }
  return rows;
}

TimingReport timing_benchmark(const mlp::Params& params,
                              const CompactModel& model, int batch_size,
                              std::uint64_t seed) {
  if (batch_size < 100)
    throw InvalidConfig("timing_benchmark: batch size must be at least 100");

  const auto box = oracle::bounding_box(model, 0.1);
  const auto pts =
      draw_box_points(box, batch_size, derive_seed(seed, "timing"));
  Eigen::MatrixXd x(batch_size, box.lo.size());
  for (int i = 0; i < batch_size; ++i)
    x.row(i) = pts[static_cast<std::size_t>(i)].transpose();

  double best = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < 5; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    volatile int sink = mlp::classify(params, x).sum();
    (void)sink;
    best = std::min(best, seconds_since(t0));
  }

  const int oracle_n = std::min(batch_size, 200);
  const std::vector<Eigen::VectorXd> subset(pts.begin(),
                                            pts.begin() + oracle_n);
  std::vector<double> seconds;
  oracle::label_batch(model, subset, {}, 1, &seconds);
  const double oracle_total =
      std::accumulate(seconds.begin(), seconds.end(), 0.0);

  TimingReport r;
  r.classify_per_sample_s = best / static_cast<double>(batch_size);
  r.oracle_per_sample_s = oracle_total / static_cast<double>(oracle_n);
  r.ratio = r.classify_per_sample_s > 0.0
                ? r.oracle_per_sample_s / r.classify_per_sample_s
                : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace dsfs::evaluation
