#include "dsfs/active_loop.hpp"

#include <algorithm>
#include <numeric>

#include "dsfs/errors.hpp"
#include "dsfs/robust_box.hpp"

namespace dsfs::active_loop {

namespace {

void validate(const ActiveConfig& cfg) {
  if (cfg.pool_size < 1)
    throw InvalidConfig("active loop: pool_size must be positive");
  if (cfg.init_labeled < 0 || cfg.init_labeled > cfg.pool_size)
    throw InvalidConfig("active loop: init_labeled outside [0, pool_size]");
  if (cfg.per_epoch < 1)
    throw InvalidConfig("active loop: per_epoch must be positive");
  if (cfg.epochs < 0)
    throw InvalidConfig("active loop: epochs must be nonnegative");
  if (cfg.hidden.empty())
    throw InvalidConfig("active loop: need at least one hidden layer");
  if (cfg.inflation < 0)
    throw InvalidConfig("active loop: inflation must be nonnegative");
  if (cfg.label_tol < 0)
    throw InvalidConfig("active loop: label_tol must be nonnegative");
  if (cfg.freeze_prefix < 0)
    throw InvalidConfig("active loop: freeze_prefix must be nonnegative");
}

oracle::SamplePoint label_known(LoopState& st, const ActiveConfig& cfg,
                                const Eigen::VectorXd& q, bool member) {
  oracle::SamplePoint s;
  s.p0 = q;
  if (member) {
    s.label = oracle::Label::Feasible;
    s.provenance = oracle::Provenance::GeometricMember;
    ++st.hull_labels;
    return s;
  }
  oracle::CheckOptions opts;
  opts.label_tol = cfg.label_tol;
  const auto res = oracle::check_feasible(st.model, q, opts);
  ++st.oracle_calls;
  s.label = res.label;
  s.provenance = oracle::Provenance::OracleLp;
  if (cfg.use_hull_labeling && res.label == oracle::Label::Feasible)
    inner_set::grow(st.inner, {q});
  return s;
}

// Labels the pool points at `picks` in the given order, moving successes to
// the training set. Budget-blocked points stay in the pool.
void label_and_move(LoopState& st, const ActiveConfig& cfg,
                    const std::vector<std::size_t>& picks) {
  std::vector<char> taken(st.pool.size(), 0);
  for (std::size_t idx : picks) {
    const Eigen::VectorXd& q = st.pool[idx].p0;
    const bool member =
        cfg.use_hull_labeling && inner_set::is_member(st.inner, q);
    if (!member && cfg.label_budget >= 0 &&
        st.oracle_calls >= cfg.label_budget)
      continue;
    st.labeled.push_back(label_known(st, cfg, q, member));
    taken[idx] = 1;
  }
  std::size_t w = 0;
  for (std::size_t r = 0; r < st.pool.size(); ++r)
    if (!taken[r]) {
      if (w != r) st.pool[w] = std::move(st.pool[r]);
      ++w;
    }
  st.pool.resize(w);
}

HistoryRow snapshot(const LoopState& st, int epoch, double mean_loss,
                    const std::vector<oracle::SamplePoint>* eval_set) {
  HistoryRow row;
  row.epoch = epoch;
  row.oracle_calls = st.oracle_calls;
  row.hull_labels = st.hull_labels;
  row.mean_loss = mean_loss;
  if (eval_set == nullptr || eval_set->empty()) return row;

  const int n = static_cast<int>(eval_set->size());
  Eigen::MatrixXd xs(n, st.model.steps);
  for (int i = 0; i < n; ++i) {
    const auto& s = (*eval_set)[i];
    if (s.label == oracle::Label::Unlabeled)
      throw InvalidConfig("active loop: evaluation set has unlabeled points");
    xs.row(i) = s.p0.transpose();
  }
  const auto pred = mlp::classify(st.params, xs);
  long tp = 0, fp = 0, fn = 0;
  for (int i = 0; i < n; ++i) {
    const bool truth = (*eval_set)[i].label == oracle::Label::Feasible;
    if (pred[i] == 1 && truth) ++tp;
    if (pred[i] == 1 && !truth) ++fp;
    if (pred[i] == 0 && truth) ++fn;
  }
  row.precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
  row.recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
  row.f1 = 2 * tp + fp + fn > 0 ? 2.0 * tp / double(2 * tp + fp + fn) : 0.0;
  return row;
}

}  // namespace

std::string to_string(Strategy s) {
  return s == Strategy::Uncertainty ? "uncertainty" : "random";
}

LoopState initialize(const CompactModel& model, const ActiveConfig& cfg,
                     const mlp::Params* warm) {
  validate(cfg);
  LoopState st;
  st.model = model;
  st.seed = cfg.seed;
  st.box = oracle::bounding_box(model, cfg.inflation);
  const int T = model.steps;

  // Pool draw order: point by point, coordinates in step order.
  SeedStream pool_rng(derive_seed(cfg.seed, "pool"));
  st.pool.resize(static_cast<std::size_t>(cfg.pool_size));
  for (auto& s : st.pool) {
    s.p0.resize(T);
    for (int t = 0; t < T; ++t)
      s.p0[t] = pool_rng.uniform(st.box.lo[t], st.box.hi[t]);
  }

  if (cfg.use_inner_box) {
    // A degenerate box still marks one certified feasible point; keep it.
    const auto box = robust_box::solve_inner_box(model);
    st.box_degenerate = box.degenerate;
    st.inner = inner_set::from_box(box.p0_minus, box.p0_plus);
  } else {
    st.inner = inner_set::make_empty(T);
  }

  if (warm != nullptr) {
    st.params = mlp::transfer(*warm, cfg.freeze_prefix, T);
  } else {
    std::vector<int> sizes;
    sizes.reserve(cfg.hidden.size() + 2);
    sizes.push_back(T);
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(1);
    st.params = mlp::init(sizes, derive_seed(cfg.seed, "mlp-init"));
    st.params.norm.center = 0.5 * (st.box.lo + st.box.hi);
    st.params.norm.half = (0.5 * (st.box.hi - st.box.lo)).cwiseMax(1e-9);
  }

  st.select_rng = SeedStream(derive_seed(cfg.seed, "select"));

  if (cfg.init_labeled > 0) {
    SeedStream init_rng(derive_seed(cfg.seed, "init-select"));
    const auto picks = init_rng.sample_without_replacement(
        st.pool.size(), static_cast<std::size_t>(cfg.init_labeled));
    label_and_move(st, cfg, picks);
  }
  return st;
}

oracle::SamplePoint label_point(LoopState& state, const ActiveConfig& cfg,
                                const Eigen::VectorXd& q) {
  if (q.size() != state.model.steps)
    throw DimensionMismatch("active loop: profile length != horizon");
  const bool member =
      cfg.use_hull_labeling && inner_set::is_member(state.inner, q);
  return label_known(state, cfg, q, member);
}

void run_epoch(LoopState& state, const ActiveConfig& cfg) {
  if (state.pool.empty()) throw EmptyPool("active loop: pool exhausted");
  const std::size_t take =
      std::min(static_cast<std::size_t>(cfg.per_epoch), state.pool.size());

  std::vector<std::size_t> picks;
  if (cfg.strategy == Strategy::Uncertainty) {
    Eigen::MatrixXd xs(state.pool.size(), state.model.steps);
    for (std::size_t i = 0; i < state.pool.size(); ++i)
      xs.row(static_cast<int>(i)) = state.pool[i].p0.transpose();
    const Eigen::VectorXd m = mlp::uncertainty(mlp::posterior(state.params, xs));
    picks.resize(state.pool.size());
    std::iota(picks.begin(), picks.end(), std::size_t{0});
    std::partial_sort(picks.begin(), picks.begin() + take, picks.end(),
                      [&m](std::size_t a, std::size_t b) {
                        const double ma = m[static_cast<int>(a)];
                        const double mb = m[static_cast<int>(b)];
                        return ma != mb ? ma > mb : a < b;
                      });
    picks.resize(take);
  } else {
    picks = state.select_rng.sample_without_replacement(state.pool.size(), take);
  }

  label_and_move(state, cfg, picks);

  state.last_mean_loss = 0.0;
  if (!state.labeled.empty()) {
    const int n = static_cast<int>(state.labeled.size());
    Eigen::MatrixXd xs(n, state.model.steps);
    Eigen::VectorXd ys(n);
    for (int i = 0; i < n; ++i) {
      xs.row(i) = state.labeled[i].p0.transpose();
      ys[i] = state.labeled[i].label == oracle::Label::Feasible ? 1.0 : 0.0;
    }
    mlp::TrainConfig tc = cfg.train;
    tc.seed = derive_seed(state.seed, "train-epoch",
                          static_cast<std::uint64_t>(state.epoch) + 1);
    state.last_mean_loss = mlp::train_epoch(state.params, xs, ys, tc).mean_loss;
  }

  if (cfg.use_hull_labeling) inner_set::prune(state.inner);
  ++state.epoch;
}

RunResult run(const CompactModel& model, const ActiveConfig& cfg,
              const mlp::Params* warm,
              const std::vector<oracle::SamplePoint>* eval_set) {
  RunResult rr{initialize(model, cfg, warm), {}, {}};
  rr.initial = snapshot(rr.state, 0, 0.0, eval_set);
  for (int e = 1; e <= cfg.epochs; ++e) {
    if (rr.state.pool.empty()) break;
    const bool budget_spent = cfg.label_budget >= 0 &&
                              rr.state.oracle_calls >= cfg.label_budget;
    if (budget_spent && !cfg.use_hull_labeling) break;
    run_epoch(rr.state, cfg);
    rr.history.push_back(
        snapshot(rr.state, e, rr.state.last_mean_loss, eval_set));
  }
  return rr;
}

}  // namespace dsfs::active_loop
