#include "dsfs/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "dsfs/errors.hpp"
#include "dsfs/rng.hpp"

namespace dsfs::mlp {

namespace {

void check_params(const Params& p) {
  if (p.sizes.size() < 2 || p.sizes.back() != 1)
    throw InvalidArchitecture("mlp: sizes must end in a single output");
  const std::size_t layers = p.sizes.size() - 1;
  if (p.weights.size() != layers || p.biases.size() != layers ||
      p.frozen.size() != layers)
    throw InvalidArchitecture("mlp: layer container sizes disagree");
  if (p.norm.center.size() != p.sizes.front() ||
      p.norm.half.size() != p.sizes.front())
    throw InvalidArchitecture("mlp: normalization width != input width");
  if ((p.norm.half.array() <= 0).any())
    throw InvalidConfig("mlp: normalization half-widths must be positive");
}

void check_batch(const Params& p, const Eigen::MatrixXd& x) {
  if (x.cols() != p.sizes.front())
    throw DimensionMismatch("mlp: input width does not match the network");
  if (x.size() > 0 && !x.allFinite())
    throw InvalidConfig("mlp: non-finite inputs");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  // log(1 + e^z) without overflow on either tail.
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

struct Forward {
  std::vector<Eigen::MatrixXd> acts;  // acts[0] = normalized input
  std::vector<Eigen::MatrixXd> pre;   // pre[l] = acts[l] * W_l' + b_l
};

Forward run_forward(const Params& p, const Eigen::MatrixXd& x) {
  Forward f;
  const std::size_t layers = p.weights.size();
  f.acts.resize(layers + 1);
  f.pre.resize(layers);
  f.acts[0] = (x.rowwise() - p.norm.center.transpose()).array().rowwise() /
              p.norm.half.transpose().array();
  for (std::size_t l = 0; l < layers; ++l) {
    f.pre[l].noalias() = f.acts[l] * p.weights[l].transpose();
    f.pre[l].rowwise() += p.biases[l].transpose();
    if (l + 1 < layers) {
      f.acts[l + 1] = f.pre[l].cwiseMax(0.0);
    } else {
      f.acts[l + 1] = f.pre[l];
    }
  }
  return f;
}

void check_labels(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() == 0) throw EmptyDataset("mlp: empty batch");
  if (y.size() != x.rows())
    throw DimensionMismatch("mlp: label count != row count");
  for (int i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0)
      throw InvalidConfig("mlp: labels must be exactly 0 or 1");
  }
}

}  // namespace

Params init(const std::vector<int>& sizes, std::uint64_t seed) {
  if (sizes.size() < 3)
    throw InvalidArchitecture("mlp: need input, hidden, and output layers");
  for (int s : sizes) {
    if (s < 1) throw InvalidArchitecture("mlp: layer sizes must be positive");
  }
  if (sizes.back() != 1)
    throw InvalidArchitecture("mlp: output layer size must be 1");

  Params p;
  p.sizes = sizes;
  const std::size_t layers = sizes.size() - 1;
  p.weights.resize(layers);
  p.biases.resize(layers);
  p.frozen.assign(layers, false);
  SeedStream rng(seed);
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    p.weights[l].resize(out, in);
    for (int i = 0; i < out; ++i)
      for (int j = 0; j < in; ++j)
        p.weights[l](i, j) = rng.uniform(-bound, bound);
    p.biases[l] = Eigen::VectorXd::Zero(out);
  }
  p.norm.center = Eigen::VectorXd::Zero(sizes.front());
  p.norm.half = Eigen::VectorXd::Ones(sizes.front());
  return p;
}

Eigen::VectorXd posterior(const Params& p, const Eigen::MatrixXd& x) {
  check_params(p);
  check_batch(p, x);
  const Forward f = run_forward(p, x);
  Eigen::VectorXd out(x.rows());
  for (int i = 0; i < out.size(); ++i) {
    const double z = std::clamp(f.pre.back()(i, 0), -30.0, 30.0);
    out[i] = sigmoid(z);
  }
  return out;
}

Eigen::VectorXi classify(const Params& p, const Eigen::MatrixXd& x) {
  const Eigen::VectorXd post = posterior(p, x);
  Eigen::VectorXi labels(post.size());
  for (int i = 0; i < post.size(); ++i) labels[i] = post[i] > 0.5 ? 1 : 0;
  return labels;
}

Eigen::VectorXd uncertainty(const Eigen::VectorXd& posteriors) {
  Eigen::VectorXd out(posteriors.size());
  for (int i = 0; i < out.size(); ++i) {
    const double p = posteriors[i];
    if (!(p >= 0.0 && p <= 1.0))
      throw OutOfRange("mlp: uncertainty input outside [0, 1]");
    out[i] = 2.0 * std::min(p, 1.0 - p);
  }
  return out;
}

double bce_loss(const Params& p, const Eigen::MatrixXd& x,
                const Eigen::VectorXd& y) {
  check_params(p);
  check_batch(p, x);
  check_labels(x, y);
  const Forward f = run_forward(p, x);
  double total = 0.0;
  for (int i = 0; i < x.rows(); ++i) {
    const double z = f.pre.back()(i, 0);
    total += softplus(z) - y[i] * z;
  }
  return total / static_cast<double>(x.rows());
}

Gradients gradients(const Params& p, const Eigen::MatrixXd& x,
                    const Eigen::VectorXd& y) {
  check_params(p);
  check_batch(p, x);
  check_labels(x, y);

  const std::size_t layers = p.weights.size();
  const int n = static_cast<int>(x.rows());
  const Forward f = run_forward(p, x);

  Gradients g;
  g.dw.resize(layers);
  g.db.resize(layers);

  double total = 0.0;
  Eigen::MatrixXd delta(n, 1);
  for (int i = 0; i < n; ++i) {
    const double z = f.pre.back()(i, 0);
    total += softplus(z) - y[i] * z;
    delta(i, 0) = (sigmoid(z) - y[i]) / n;
  }
  g.loss = total / n;

  for (std::size_t l = layers; l-- > 0;) {
    g.dw[l].noalias() = delta.transpose() * f.acts[l];
    g.db[l] = delta.colwise().sum().transpose();
    if (l == 0) break;
    Eigen::MatrixXd back = delta * p.weights[l];
    delta = back.cwiseProduct(
        (f.pre[l - 1].array() > 0.0).cast<double>().matrix());
  }
  return g;
}

TrainTrace train_epoch(Params& p, const Eigen::MatrixXd& x,
                       const Eigen::VectorXd& y, const TrainConfig& cfg) {
  check_params(p);
  check_batch(p, x);
  check_labels(x, y);
  if (cfg.steps < 1) throw InvalidConfig("mlp: steps must be positive");
  if (!(cfg.learning_rate > 0) || !(cfg.beta1 > 0 && cfg.beta1 < 1) ||
      !(cfg.beta2 > 0 && cfg.beta2 < 1) || !(cfg.eps > 0) ||
      cfg.weight_decay < 0 || cfg.batch_size < 0)
    throw InvalidConfig("mlp: malformed optimizer settings");

  const std::size_t layers = p.weights.size();
  std::vector<Eigen::MatrixXd> mw(layers), vw(layers);
  std::vector<Eigen::VectorXd> mb(layers), vb(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    mw[l] = Eigen::MatrixXd::Zero(p.weights[l].rows(), p.weights[l].cols());
    vw[l] = mw[l];
    mb[l] = Eigen::VectorXd::Zero(p.biases[l].size());
    vb[l] = mb[l];
  }

  const int n = static_cast<int>(x.rows());
  const bool full = cfg.batch_size == 0 || cfg.batch_size >= n;
  SeedStream rng(cfg.seed);

  TrainTrace trace;
  trace.losses.reserve(cfg.steps);
  Eigen::MatrixXd xb;
  Eigen::VectorXd yb;
  for (int step = 1; step <= cfg.steps; ++step) {
    const Eigen::MatrixXd* bx = &x;
    const Eigen::VectorXd* by = &y;
    if (!full) {
      const auto idx = rng.sample_without_replacement(
          static_cast<std::size_t>(n), static_cast<std::size_t>(cfg.batch_size));
      xb.resize(cfg.batch_size, x.cols());
      yb.resize(cfg.batch_size);
      for (int i = 0; i < cfg.batch_size; ++i) {
        xb.row(i) = x.row(static_cast<int>(idx[i]));
        yb[i] = y[static_cast<int>(idx[i])];
      }
      bx = &xb;
      by = &yb;
    }

    Gradients g = gradients(p, *bx, *by);
    if (!std::isfinite(g.loss))
      throw NonFiniteLoss("mlp: loss left the reals during training");
    trace.losses.push_back(g.loss);

    const double bc1 = 1.0 - std::pow(cfg.beta1, step);
    const double bc2 = 1.0 - std::pow(cfg.beta2, step);
    for (std::size_t l = 0; l < layers; ++l) {
      if (p.frozen[l]) continue;
      if (cfg.weight_decay > 0) g.dw[l] += cfg.weight_decay * p.weights[l];

      mw[l] = cfg.beta1 * mw[l] + (1.0 - cfg.beta1) * g.dw[l];
      vw[l] = cfg.beta2 * vw[l] +
              (1.0 - cfg.beta2) * g.dw[l].cwiseProduct(g.dw[l]);
      p.weights[l].array() -=
          cfg.learning_rate * (mw[l].array() / bc1) /
          ((vw[l].array() / bc2).sqrt() + cfg.eps);

      mb[l] = cfg.beta1 * mb[l] + (1.0 - cfg.beta1) * g.db[l];
      vb[l] = cfg.beta2 * vb[l] + (1.0 - cfg.beta2) * g.db[l].cwiseProduct(g.db[l]);
      p.biases[l].array() -= cfg.learning_rate * (mb[l].array() / bc1) /
                             ((vb[l].array() / bc2).sqrt() + cfg.eps);
    }
  }
  double sum = 0.0;
  for (double v : trace.losses) sum += v;
  trace.mean_loss = sum / static_cast<double>(trace.losses.size());
  return trace;
}

Params transfer(const Params& src, int freeze_prefix, int expected_input) {
  check_params(src);
  const int hidden = static_cast<int>(src.sizes.size()) - 2;
  if (freeze_prefix < 0 || freeze_prefix > hidden)
    throw InvalidConfig("mlp: freeze prefix outside the hidden stack");
  if (expected_input >= 0 && src.sizes.front() != expected_input)
    throw ArchitectureMismatch("mlp: transferred input width mismatch");
  Params out = src;
  out.frozen.assign(src.weights.size(), false);
  for (int l = 0; l < freeze_prefix; ++l) out.frozen[l] = true;
  return out;
}

}  // namespace dsfs::mlp
