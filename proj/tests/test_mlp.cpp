#include "dsfs/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "doctest.h"
#include "dsfs/errors.hpp"
#include "dsfs/rng.hpp"

using namespace dsfs;

namespace {

bool same_bits(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(),
                     sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

bool same_bits(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(),
                     sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

bool same_bits(const mlp::Params& a, const mlp::Params& b) {
  if (a.sizes != b.sizes || a.frozen != b.frozen) return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (!same_bits(a.weights[l], b.weights[l])) return false;
    if (!same_bits(a.biases[l], b.biases[l])) return false;
  }
  return same_bits(a.norm.center, b.norm.center) &&
         same_bits(a.norm.half, b.norm.half);
}

double ref_sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Loop-level re-derivation of the forward pass, kept free of Eigen products
// so it can stand as an independent oracle. Also reports the smallest hidden
// preactivation magnitude, used to keep finite differencing away from the
// rectifier kink.
struct RefRow {
  double logit = 0.0;
  double min_hidden_margin = std::numeric_limits<double>::infinity();
};

RefRow ref_forward_row(const mlp::Params& p, const Eigen::VectorXd& x) {
  std::vector<double> a(static_cast<std::size_t>(x.size()));
  for (int i = 0; i < x.size(); ++i)
    a[static_cast<std::size_t>(i)] = (x[i] - p.norm.center[i]) / p.norm.half[i];

  RefRow out;
  const std::size_t layers = p.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& w = p.weights[l];
    std::vector<double> z(static_cast<std::size_t>(w.rows()));
    for (int i = 0; i < w.rows(); ++i) {
      double s = p.biases[l][i];
      for (int j = 0; j < w.cols(); ++j)
        s += w(i, j) * a[static_cast<std::size_t>(j)];
      z[static_cast<std::size_t>(i)] = s;
    }
    if (l + 1 < layers) {
      a.resize(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) {
        out.min_hidden_margin = std::min(out.min_hidden_margin, std::abs(z[i]));
        a[i] = std::max(0.0, z[i]);
      }
    } else {
      out.logit = z[0];
    }
  }
  return out;
}

double ref_posterior_row(const mlp::Params& p, const Eigen::VectorXd& x) {
  const double z = std::clamp(ref_forward_row(p, x).logit, -30.0, 30.0);
  return ref_sigmoid(z);
}

mlp::Params random_net(SeedStream& rng, const std::vector<int>& sizes) {
  auto p = mlp::init(sizes, rng.uniform_int(std::uint64_t{1} << 62));
  for (int i = 0; i < sizes.front(); ++i) {
    p.norm.center[i] = rng.uniform(-0.5, 0.5);
    p.norm.half[i] = rng.uniform(0.5, 2.0);
  }
  return p;
}

struct FdCase {
  mlp::Params p;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

// Random small net plus batch whose hidden preactivations all sit at least
// 1e-3 from zero, so a 1e-5 parameter bump cannot cross the rectifier kink.
FdCase make_fd_case(std::uint64_t salt) {
  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    SeedStream rng(derive_seed(0x5eed, "fd-case", salt * 1000 + attempt));
    const int in_dim = 1 + static_cast<int>(rng.uniform_int(4));
    const int depth = 1 + static_cast<int>(rng.uniform_int(3));
    std::vector<int> sizes{in_dim};
    for (int d = 0; d < depth; ++d)
      sizes.push_back(2 + static_cast<int>(rng.uniform_int(5)));
    sizes.push_back(1);

    FdCase c{random_net(rng, sizes), {}, {}};
    const int n = 1 + static_cast<int>(rng.uniform_int(8));
    c.x.resize(n, in_dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < in_dim; ++j) c.x(i, j) = rng.uniform(-2.0, 2.0);
    c.y.resize(n);
    for (int i = 0; i < n; ++i) c.y[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;

    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      margin = std::min(margin,
                        ref_forward_row(c.p, c.x.row(i)).min_hidden_margin);
    if (margin > 1e-3) return c;
  }
  REQUIRE_MESSAGE(false, "no kink-free gradient case found");
  return {};
}

Eigen::MatrixXd random_batch(SeedStream& rng, int n, int dim, double lo,
                             double hi) {
  Eigen::MatrixXd x(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = rng.uniform(lo, hi);
  return x;
}

}  // namespace

TEST_CASE("init: shapes, scale, zero biases, determinism") {
  const std::vector<int> sizes{2, 8, 8, 8, 8, 1};
  const auto p = mlp::init(sizes, 3);

  REQUIRE(p.weights.size() == 5);
  REQUIRE(p.biases.size() == 5);
  REQUIRE(p.frozen == std::vector<bool>(5, false));

  long count = 0;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    REQUIRE(p.weights[l].rows() == sizes[l + 1]);
    REQUIRE(p.weights[l].cols() == sizes[l]);
    REQUIRE(p.biases[l].size() == sizes[l + 1]);
    count += p.weights[l].size() + p.biases[l].size();

    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
    CHECK(p.weights[l].cwiseAbs().maxCoeff() <= bound);
    CHECK(p.biases[l].cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(count == 249);

  // Identity normalization until a bounding box is installed.
  CHECK(p.norm.center.isZero(0.0));
  CHECK((p.norm.half.array() == 1.0).all());

  CHECK(same_bits(p, mlp::init(sizes, 3)));
  CHECK_FALSE(same_bits(p, mlp::init(sizes, 4)));

  CHECK_THROWS_AS(mlp::init({2, 1}, 0), InvalidArchitecture);
  CHECK_THROWS_AS(mlp::init({2, 4, 2}, 0), InvalidArchitecture);
  CHECK_THROWS_AS(mlp::init({2, 0, 1}, 0), InvalidArchitecture);
}

TEST_CASE("posterior matches a loop-level reference and stays in (0,1)") {
  SeedStream rng(derive_seed(7, "posterior-ref"));
  for (int rep = 0; rep < 10; ++rep) {
    const auto p = random_net(rng, {3, 5, 4, 1});
    const auto x = random_batch(rng, 20, 3, -3.0, 3.0);
    const auto post = mlp::posterior(p, x);
    REQUIRE(post.size() == 20);
    for (int i = 0; i < 20; ++i) {
      CHECK(post[i] == doctest::Approx(ref_posterior_row(p, x.row(i)))
                           .epsilon(1e-12));
      CHECK(post[i] > 0.0);
      CHECK(post[i] < 1.0);
    }
  }

  // Extreme inputs drive the logit into the clamp but never out of (0,1).
  const auto p = random_net(rng, {2, 6, 1});
  Eigen::MatrixXd far(2, 2);
  far << 1e6, -1e6, -1e7, 1e7;
  const auto post = mlp::posterior(p, far);
  for (int i = 0; i < 2; ++i) {
    CHECK(post[i] > 0.0);
    CHECK(post[i] < 1.0);
  }
}

TEST_CASE("posterior: duplicates, permutation invariance, batch splits") {
  SeedStream rng(derive_seed(7, "posterior-perm"));
  const auto p = random_net(rng, {3, 6, 6, 1});
  const auto x = random_batch(rng, 12, 3, -2.0, 2.0);

  Eigen::MatrixXd dup(3, 3);
  dup.row(0) = x.row(0);
  dup.row(1) = x.row(0);
  dup.row(2) = x.row(0);
  const auto pd = mlp::posterior(p, dup);
  CHECK(pd[0] == pd[1]);
  CHECK(pd[1] == pd[2]);

  const auto base = mlp::posterior(p, x);
  Eigen::MatrixXd rev(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) rev.row(i) = x.row(x.rows() - 1 - i);
  const auto rp = mlp::posterior(p, rev);
  for (int i = 0; i < x.rows(); ++i)
    CHECK(rp[i] == doctest::Approx(base[x.rows() - 1 - i]).epsilon(1e-15));

  // Row-by-row equals the full batch: a pure per-row function.
  for (int i = 0; i < x.rows(); ++i) {
    const auto one = mlp::posterior(p, x.row(i));
    CHECK(one[0] == doctest::Approx(base[i]).epsilon(1e-15));
  }

  Eigen::MatrixXd wrong(4, 2);
  wrong.setZero();
  CHECK_THROWS_AS(mlp::posterior(p, wrong), DimensionMismatch);

  Eigen::MatrixXd bad = x;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(mlp::posterior(p, bad), InvalidConfig);
}

TEST_CASE("zero net sits exactly at one half; threshold is strict") {
  auto p = mlp::init({2, 4, 1}, 0);
  for (auto& w : p.weights) w.setZero();

  Eigen::MatrixXd x(3, 2);
  x << 0.0, 0.0, 5.0, -3.0, 1e8, 1e8;
  const auto post = mlp::posterior(p, x);
  const auto labels = mlp::classify(p, x);
  for (int i = 0; i < 3; ++i) {
    CHECK(post[i] == 0.5);
    CHECK(labels[i] == 0);  // 1 only strictly above one half
  }

  // classify agrees with thresholding the posterior on a live net.
  SeedStream rng(derive_seed(7, "classify"));
  const auto q = random_net(rng, {2, 8, 1});
  const auto xs = random_batch(rng, 40, 2, -4.0, 4.0);
  const auto qp = mlp::posterior(q, xs);
  const auto ql = mlp::classify(q, xs);
  for (int i = 0; i < 40; ++i) CHECK(ql[i] == (qp[i] > 0.5 ? 1 : 0));
}

TEST_CASE("uncertainty: formula, symmetry, bounds") {
  Eigen::VectorXd p(5);
  p << 0.5, 0.9, 0.1, 1.0, 0.0;
  const auto m = mlp::uncertainty(p);
  CHECK(m[0] == doctest::Approx(1.0));
  CHECK(m[1] == doctest::Approx(0.2));
  CHECK(m[2] == doctest::Approx(0.2));
  CHECK(m[3] == doctest::Approx(0.0));
  CHECK(m[4] == doctest::Approx(0.0));

  for (int i = 0; i <= 200; ++i) {
    const double v = i / 200.0;
    Eigen::VectorXd q(2);
    q << v, 1.0 - v;
    const auto u = mlp::uncertainty(q);
    CHECK(u[0] == doctest::Approx(u[1]).epsilon(1e-15));
    CHECK(u[0] == doctest::Approx(2.0 * std::min(v, 1.0 - v)).epsilon(1e-15));
    CHECK(u[0] >= 0.0);
    CHECK(u[0] <= 1.0);
  }

  Eigen::VectorXd low(1), high(1), nan(1);
  low << -0.01;
  high << 1.01;
  nan << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(mlp::uncertainty(low), OutOfRange);
  CHECK_THROWS_AS(mlp::uncertainty(high), OutOfRange);
  CHECK_THROWS_AS(mlp::uncertainty(nan), OutOfRange);
}

TEST_CASE("analytic gradients match central finite differences") {
  const double h = 1e-5;
  int checked = 0;
  for (std::uint64_t salt = 0; salt < 20; ++salt) {
    FdCase c = make_fd_case(salt);
    const auto g = mlp::gradients(c.p, c.x, c.y);
    CHECK(g.loss == doctest::Approx(mlp::bce_loss(c.p, c.x, c.y)));

    for (std::size_t l = 0; l < c.p.weights.size(); ++l) {
      auto& w = c.p.weights[l];
      for (int i = 0; i < w.rows(); ++i) {
        for (int j = 0; j < w.cols(); ++j) {
          const double orig = w(i, j);
          w(i, j) = orig + h;
          const double up = mlp::bce_loss(c.p, c.x, c.y);
          w(i, j) = orig - h;
          const double dn = mlp::bce_loss(c.p, c.x, c.y);
          w(i, j) = orig;
          const double num = (up - dn) / (2.0 * h);
          const double ana = g.dw[l](i, j);
          const double rel = std::abs(num - ana) /
                             std::max({1e-4, std::abs(num), std::abs(ana)});
          CAPTURE(salt);
          CAPTURE(l);
          CAPTURE(i);
          CAPTURE(j);
          CHECK(rel < 1e-4);
          ++checked;
        }
      }
      auto& b = c.p.biases[l];
      for (int i = 0; i < b.size(); ++i) {
        const double orig = b[i];
        b[i] = orig + h;
        const double up = mlp::bce_loss(c.p, c.x, c.y);
        b[i] = orig - h;
        const double dn = mlp::bce_loss(c.p, c.x, c.y);
        b[i] = orig;
        const double num = (up - dn) / (2.0 * h);
        const double ana = g.db[l][i];
        const double rel = std::abs(num - ana) /
                           std::max({1e-4, std::abs(num), std::abs(ana)});
        CHECK(rel < 1e-4);
        ++checked;
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("first Adam step moves every live weight by the learning rate") {
  SeedStream rng(derive_seed(7, "adam-step1"));
  auto p = mlp::init({2, 6, 1}, 9);
  const auto x = random_batch(rng, 8, 2, -1.5, 1.5);
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) y[i] = i % 2 == 0 ? 1.0 : 0.0;

  const auto g = mlp::gradients(p, x, y);
  const auto before = p;
  mlp::TrainConfig cfg;
  cfg.steps = 1;
  cfg.learning_rate = 1e-3;
  mlp::train_epoch(p, x, y, cfg);

  int live = 0;
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    for (int i = 0; i < p.weights[l].rows(); ++i) {
      for (int j = 0; j < p.weights[l].cols(); ++j) {
        if (std::abs(g.dw[l](i, j)) < 1e-4) continue;
        const double step = p.weights[l](i, j) - before.weights[l](i, j);
        CHECK(std::abs(std::abs(step) - cfg.learning_rate) <
              1e-3 * cfg.learning_rate);
        CHECK(step * g.dw[l](i, j) < 0.0);  // descends
        ++live;
      }
    }
    for (int i = 0; i < p.biases[l].size(); ++i) {
      if (std::abs(g.db[l][i]) < 1e-4) continue;
      const double step = p.biases[l][i] - before.biases[l][i];
      CHECK(std::abs(std::abs(step) - cfg.learning_rate) <
            1e-3 * cfg.learning_rate);
      CHECK(step * g.db[l][i] < 0.0);
      ++live;
    }
  }
  CHECK(live > 5);
}

TEST_CASE("one positive sample trains to a confident posterior") {
  auto p = mlp::init({2, 8, 8, 1}, 5);
  Eigen::MatrixXd x(1, 2);
  x << 0.3, -0.7;
  Eigen::VectorXd y(1);
  y << 1.0;

  mlp::TrainConfig cfg;
  cfg.steps = 800;
  cfg.learning_rate = 5e-3;
  const auto trace = mlp::train_epoch(p, x, y, cfg);

  REQUIRE(trace.losses.size() == 800);
  CHECK(trace.losses.front() > trace.losses.back());
  const double lo = *std::min_element(trace.losses.begin(), trace.losses.end());
  const double hi = *std::max_element(trace.losses.begin(), trace.losses.end());
  CHECK(trace.mean_loss >= lo);
  CHECK(trace.mean_loss <= hi);

  CHECK(mlp::posterior(p, x)[0] > 0.9);
  CHECK(mlp::classify(p, x)[0] == 1);
}

TEST_CASE("training separates a disk from its complement") {
  SeedStream rng(derive_seed(7, "disk"));
  const int n = 200;
  Eigen::MatrixXd x = random_batch(rng, n, 2, -1.0, 1.0);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i)
    y[i] = x.row(i).squaredNorm() < 0.5 ? 1.0 : 0.0;

  auto p = mlp::init({2, 16, 16, 1}, 21);
  mlp::TrainConfig cfg;
  cfg.steps = 600;
  cfg.learning_rate = 3e-3;
  const auto trace = mlp::train_epoch(p, x, y, cfg);
  CHECK(trace.losses.back() < 0.5 * trace.losses.front());

  const auto labels = mlp::classify(p, x);
  int correct = 0;
  for (int i = 0; i < n; ++i)
    if (labels[i] == static_cast<int>(y[i])) ++correct;
  CHECK(correct >= static_cast<int>(0.9 * n));
}

TEST_CASE("frozen layers stay bit-identical through training") {
  SeedStream rng(derive_seed(7, "frozen"));
  const auto src = mlp::init({2, 8, 8, 1}, 4);
  const auto x = random_batch(rng, 32, 2, -1.0, 1.0);
  Eigen::VectorXd y(32);
  for (int i = 0; i < 32; ++i) y[i] = x(i, 0) > 0 ? 1.0 : 0.0;

  auto p = mlp::transfer(src, 1);
  REQUIRE(p.frozen == std::vector<bool>{true, false, false});
  mlp::TrainConfig cfg;
  cfg.steps = 50;
  mlp::train_epoch(p, x, y, cfg);
  CHECK(same_bits(p.weights[0], src.weights[0]));
  CHECK(same_bits(p.biases[0], src.biases[0]));
  CHECK_FALSE(same_bits(p.weights[1], src.weights[1]));
  CHECK_FALSE(same_bits(p.weights[2], src.weights[2]));

  auto all = src;
  all.frozen.assign(3, true);
  const auto trace = mlp::train_epoch(all, x, y, cfg);
  all.frozen.assign(3, false);
  CHECK(same_bits(all, src));
  CHECK(trace.losses.size() == 50);
  // Nothing moves, so every step sees the same loss.
  CHECK(trace.losses.front() == trace.losses.back());
}

TEST_CASE("transfer copies everything and freezes the prefix") {
  auto src = mlp::init({3, 8, 8, 8, 1}, 10);
  src.norm.center << 1.0, 2.0, 3.0;
  src.norm.half << 0.5, 1.5, 2.5;
  src.frozen[2] = true;  // stale flag must not leak through

  const auto warm = mlp::transfer(src, 1, 3);
  REQUIRE(warm.frozen == std::vector<bool>{true, false, false, false});
  for (std::size_t l = 0; l < src.weights.size(); ++l) {
    CHECK(same_bits(warm.weights[l], src.weights[l]));
    CHECK(same_bits(warm.biases[l], src.biases[l]));
  }
  CHECK(same_bits(warm.norm.center, src.norm.center));
  CHECK(same_bits(warm.norm.half, src.norm.half));

  const auto plain = mlp::transfer(src, 0);
  CHECK(plain.frozen == std::vector<bool>(4, false));
  const auto deep = mlp::transfer(src, 3);
  CHECK(deep.frozen == std::vector<bool>{true, true, true, false});

  CHECK_THROWS_AS(mlp::transfer(src, 4), InvalidConfig);
  CHECK_THROWS_AS(mlp::transfer(src, -1), InvalidConfig);
  CHECK_THROWS_AS(mlp::transfer(src, 1, 5), ArchitectureMismatch);
}

TEST_CASE("minibatch training is deterministic in the seed") {
  SeedStream rng(derive_seed(7, "minibatch"));
  const auto x = random_batch(rng, 16, 2, -1.0, 1.0);
  Eigen::VectorXd y(16);
  for (int i = 0; i < 16; ++i) y[i] = x(i, 1) < 0 ? 1.0 : 0.0;

  mlp::TrainConfig cfg;
  cfg.steps = 40;
  cfg.batch_size = 4;
  cfg.seed = 77;

  auto a = mlp::init({2, 8, 1}, 11);
  auto b = mlp::init({2, 8, 1}, 11);
  const auto ta = mlp::train_epoch(a, x, y, cfg);
  const auto tb = mlp::train_epoch(b, x, y, cfg);
  CHECK(same_bits(a, b));
  CHECK(ta.losses == tb.losses);

  auto c = mlp::init({2, 8, 1}, 11);
  cfg.seed = 78;
  const auto tc = mlp::train_epoch(c, x, y, cfg);
  CHECK_FALSE(ta.losses == tc.losses);

  // A batch covering the whole dataset is the full-batch path.
  auto d = mlp::init({2, 8, 1}, 11);
  auto e = mlp::init({2, 8, 1}, 11);
  mlp::TrainConfig full;
  full.steps = 15;
  full.batch_size = 0;
  mlp::TrainConfig covering = full;
  covering.batch_size = 16;
  mlp::train_epoch(d, x, y, full);
  mlp::train_epoch(e, x, y, covering);
  CHECK(same_bits(d, e));
}

TEST_CASE("normalization is an input-space affine reparametrization") {
  SeedStream rng(derive_seed(7, "norm-equiv"));
  auto p = random_net(rng, {3, 6, 6, 1});
  auto q = p;
  q.norm.center.setZero();
  q.norm.half.setOnes();

  const auto x = random_batch(rng, 15, 3, -2.0, 2.0);
  Eigen::MatrixXd xn = x;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j)
      xn(i, j) = (x(i, j) - p.norm.center[j]) / p.norm.half[j];

  const auto a = mlp::posterior(p, x);
  const auto b = mlp::posterior(q, xn);
  for (int i = 0; i < a.size(); ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));

  auto bad = p;
  bad.norm.half[1] = 0.0;
  CHECK_THROWS_AS(mlp::posterior(bad, x), InvalidConfig);
  auto torn = p;
  torn.weights.pop_back();
  CHECK_THROWS_AS(mlp::posterior(torn, x), InvalidArchitecture);
}

TEST_CASE("training rejects malformed input and reports divergence") {
  auto p = mlp::init({2, 4, 1}, 0);
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 1, 0, 0, 1, 1, 1;
  Eigen::VectorXd y(4);
  y << 0, 1, 1, 0;

  Eigen::MatrixXd empty(0, 2);
  Eigen::VectorXd none(0);
  CHECK_THROWS_AS(mlp::train_epoch(p, empty, none, {}), EmptyDataset);
  CHECK_THROWS_AS(mlp::bce_loss(p, empty, none), EmptyDataset);

  Eigen::VectorXd half = y;
  half[2] = 0.5;
  CHECK_THROWS_AS(mlp::train_epoch(p, x, half, {}), InvalidConfig);
  Eigen::VectorXd negative = y;
  negative[0] = -1.0;
  CHECK_THROWS_AS(mlp::gradients(p, x, negative), InvalidConfig);
  Eigen::VectorXd short_y(3);
  short_y << 0, 1, 1;
  CHECK_THROWS_AS(mlp::train_epoch(p, x, short_y, {}), DimensionMismatch);

  mlp::TrainConfig bad;
  bad.steps = 0;
  CHECK_THROWS_AS(mlp::train_epoch(p, x, y, bad), InvalidConfig);
  bad = {};
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(mlp::train_epoch(p, x, y, bad), InvalidConfig);
  bad = {};
  bad.beta1 = 1.0;
  CHECK_THROWS_AS(mlp::train_epoch(p, x, y, bad), InvalidConfig);
  bad = {};
  bad.beta2 = 0.0;
  CHECK_THROWS_AS(mlp::train_epoch(p, x, y, bad), InvalidConfig);
  bad = {};
  bad.eps = 0.0;
  CHECK_THROWS_AS(mlp::train_epoch(p, x, y, bad), InvalidConfig);
  bad = {};
  bad.batch_size = -1;
  CHECK_THROWS_AS(mlp::train_epoch(p, x, y, bad), InvalidConfig);

  // An absurd learning rate overflows the logits within a few steps.
  auto tiny = mlp::init({1, 1, 1}, 1);
  tiny.weights[0](0, 0) = 1.0;
  tiny.weights[1](0, 0) = 1.0;
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  Eigen::VectorXd pos(1);
  pos << 1.0;
  mlp::TrainConfig wild;
  wild.steps = 5;
  wild.learning_rate = 1e154;
  CHECK_THROWS_AS(mlp::train_epoch(tiny, one, pos, wild), NonFiniteLoss);
}

TEST_CASE("weight decay shrinks weights, spares biases") {
  // Zero output weights pin the logit at 0, and a balanced label pair on a
  // duplicated row cancels the cross-entropy gradient exactly. The only
  // remaining force on the hidden weights is the decay term.
  auto p = mlp::init({1, 2, 1}, 3);
  p.weights[0].setOnes();
  p.weights[1].setZero();

  Eigen::MatrixXd x(2, 1);
  x << 1.0, 1.0;
  Eigen::VectorXd y(2);
  y << 0.0, 1.0;

  mlp::TrainConfig plain;
  plain.steps = 10;
  auto untouched = p;
  mlp::train_epoch(untouched, x, y, plain);
  CHECK(same_bits(untouched, p));  // stationary point, nothing moves

  mlp::TrainConfig cfg = plain;
  cfg.weight_decay = 1e-2;
  auto decayed = p;
  mlp::train_epoch(decayed, x, y, cfg);
  CHECK(decayed.weights[0](0, 0) < 1.0);
  CHECK(decayed.weights[0](1, 0) < 1.0);
  CHECK(same_bits(decayed.weights[1], p.weights[1]));  // zero stays zero
  CHECK(same_bits(decayed.biases[0], p.biases[0]));    // biases exempt
  CHECK(same_bits(decayed.biases[1], p.biases[1]));
}
