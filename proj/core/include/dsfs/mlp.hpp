#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace dsfs::mlp {

// Input normalization applied inside the network: a0 = (x - center) / half.
// Half-widths must stay positive.
struct Normalization {
  Eigen::VectorXd center;
  Eigen::VectorXd half;
};

// Fully-connected ReLU classifier with a single sigmoid output. Layer l maps
// activations of size sizes[l] to sizes[l+1]; weights[l] is
// (sizes[l+1] x sizes[l]). frozen[l] exempts layer l from training updates.
struct Params {
  std::vector<int> sizes;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  std::vector<bool> frozen;
  Normalization norm;
};

// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases, identity
// normalization, nothing frozen. sizes must list input, at least one hidden
// layer, and a final output of exactly 1.
Params init(const std::vector<int>& sizes, std::uint64_t seed);

// Membership posteriors for the rows of x. The output logit is clamped to
// [-30, 30], keeping every posterior strictly inside (0, 1).
Eigen::VectorXd posterior(const Params& p, const Eigen::MatrixXd& x);

// Predicted labels: 1 iff the posterior strictly exceeds one half.
Eigen::VectorXi classify(const Params& p, const Eigen::MatrixXd& x);

// Uncertainty of a posterior vector: 2 * min(P, 1 - P), in [0, 1], largest
// where the classifier is least decided. Entries must lie in [0, 1].
Eigen::VectorXd uncertainty(const Eigen::VectorXd& posteriors);

struct TrainConfig {
  int steps = 300;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // L2 on weights, biases exempt
  int batch_size = 0;         // 0 trains on the full dataset every step
  std::uint64_t seed = 0;     // minibatch sampling stream
};

struct TrainTrace {
  std::vector<double> losses;  // pre-update loss of each step's batch
  double mean_loss = 0.0;
};

// Runs `steps` Adam updates against the binary cross entropy. Adam moments
// start at zero on every call. Labels must be exactly 0 or 1. Frozen layers
// receive no updates and accumulate no moments. Throws NonFiniteLoss the
// moment the loss leaves the reals.
TrainTrace train_epoch(Params& p, const Eigen::MatrixXd& x,
                       const Eigen::VectorXd& y, const TrainConfig& cfg = {});

// Mean binary cross entropy, computed with the softplus form; safe for any
// logit magnitude.
double bce_loss(const Params& p, const Eigen::MatrixXd& x,
                const Eigen::VectorXd& y);

struct Gradients {
  std::vector<Eigen::MatrixXd> dw;
  std::vector<Eigen::VectorXd> db;
  double loss = 0.0;
};

// Analytic mean-BCE gradients for one batch (no weight decay); exposed so
// tests can difference them against finite perturbations.
Gradients gradients(const Params& p, const Eigen::MatrixXd& x,
                    const Eigen::VectorXd& y);

// Copy of src ready for a new task: weights, biases, and normalization carry
// over; the first freeze_prefix hidden layers are frozen, everything else is
// trainable. expected_input >= 0 asserts the input width of the new task.
Params transfer(const Params& src, int freeze_prefix, int expected_input = -1);

}  // namespace dsfs::mlp
