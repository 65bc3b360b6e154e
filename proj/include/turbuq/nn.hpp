#pragma once

// Self-contained tiny 1D convolutional regression network with reverse-mode
// gradients. All trainable parameters live in one flat vector; layer specs
// address slices of it, so the optimizer and checkpoints see a single theta.

#include <cstdint>
#include <span>
#include <vector>

#include "turbuq/errors.hpp"

namespace turbuq::ml {

// Sample-major batch of channels x length feature maps.
struct Batch {
  int count = 0;
  int channels = 0;
  int len = 0;
  std::vector<double> v;

  Batch() = default;
  Batch(int n, int c, int l)
      : count(n), channels(c), len(l), v(static_cast<std::size_t>(n) * c * l, 0.0) {}

  double& at(int s, int c, int i) {
    return v[(static_cast<std::size_t>(s) * channels + c) * len + i];
  }
  double at(int s, int c, int i) const {
    return v[(static_cast<std::size_t>(s) * channels + c) * len + i];
  }
};

enum class LayerKind { Conv1D, BatchNorm, Relu, MaxPool, Flatten, Dense };

struct LayerSpec {
  LayerKind kind = LayerKind::Relu;
  int in_ch = 0, out_ch = 0, kernel = 0;  // Conv1D
  int channels = 0;                       // BatchNorm
  int window = 2, stride = 2;             // MaxPool
  int in = 0, out = 0;                    // Dense
  int param_offset = 0;                   // slice start in the flat parameter vector
  int stat_offset = 0;                    // slice start in the running-stat vectors

  int param_count() const;

  static LayerSpec conv1d(int in_ch, int out_ch, int kernel);
  static LayerSpec batchnorm(int channels);
  static LayerSpec relu();
  static LayerSpec maxpool(int window = 2, int stride = 2);
  static LayerSpec flatten();
  static LayerSpec dense(int in, int out);
};

struct CnnArchitecture {
  int input_channels = 0;
  int input_len = 0;
  std::vector<LayerSpec> layers;

  // conv(1->c1, k3) -> BN -> ReLU -> conv(c1->c2, k3) -> BN -> ReLU ->
  // maxpool(2,2) -> flatten -> dense(hidden) -> ReLU -> dense(1).
  // Defaults give the 85-parameter regression network.
  static CnnArchitecture conv_net(int input_len = 9, int c1 = 2, int c2 = 2, int hidden = 9);

  int param_count() const;
  int stat_count() const;  // running mean/var slots across BatchNorm layers
  void assign_offsets();
};

enum class Mode { Training, Inference };

enum class Loss { Mae, Mse };

// Per-layer caches recorded by a training-mode forward pass.
struct LayerTrace {
  Batch input;
  std::vector<double> bn_mean, bn_var;  // per channel
  Batch bn_xhat;
  std::vector<int> pool_argmax;  // source position per output element
};

struct ForwardTrace {
  std::vector<LayerTrace> layers;
  Batch output;
};

struct CnnModel {
  CnnArchitecture arch;
  std::vector<double> params;        // flat theta, trainable
  std::vector<double> running_mean;  // BatchNorm running statistics
  std::vector<double> running_var;
  Mode mode = Mode::Inference;
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;

  // Weights and biases uniform in +-sqrt(1/fan_in) from the seeded stream;
  // BatchNorm gamma = 1, beta = 0; running stats (0, 1).
  static CnnModel init(const CnnArchitecture& arch, std::uint64_t seed);

  // Batched pass honoring `mode`. Training mode normalizes with batch
  // statistics, updates running stats, and fills `trace` when given;
  // inference mode uses running statistics and leaves the model untouched.
  Batch forward(const Batch& input, ForwardTrace* trace = nullptr);

  // Single-window inference pass.
  double forward(std::span<const double> window) const;
};

int param_count(const CnnModel& model);

// --- layer kernels ------------------------------------------------------

// Valid cross-correlation; out length = len - kernel + 1. InputTooShort
// when len < kernel.
Batch conv1d_forward(const Batch& x, std::span<const double> weights,
                     std::span<const double> bias, int out_ch, int kernel);

// Training-mode batch normalization over (batch x length) per channel,
// biased variance. Updates running stats in place with the given momentum.
// DegenerateBatch when x.count < 2.
Batch batchnorm_forward_train(const Batch& x, std::span<const double> gamma,
                              std::span<const double> beta, std::span<double> running_mean,
                              std::span<double> running_var, double momentum, double eps,
                              std::vector<double>* mean_out = nullptr,
                              std::vector<double>* var_out = nullptr, Batch* xhat_out = nullptr);

// Inference-mode normalization with running statistics.
Batch batchnorm_forward_infer(const Batch& x, std::span<const double> gamma,
                              std::span<const double> beta, std::span<const double> running_mean,
                              std::span<const double> running_var, double eps);

Batch relu_forward(const Batch& x);

// Per-window maxima; a trailing remainder shorter than the window is dropped.
Batch maxpool1d_forward(const Batch& x, int window = 2, int stride = 2,
                        std::vector<int>* argmax = nullptr);

Batch flatten_forward(const Batch& x);

// y = W x + b on flattened (single-channel) input.
Batch dense_forward(const Batch& x, std::span<const double> weights,
                    std::span<const double> bias, int out);

// --- losses -------------------------------------------------------------

// Mean absolute / squared error. EmptyBatch on empty input, LengthMismatch
// on unequal lengths.
double mae_loss(std::span<const double> pred, std::span<const double> target);
double mse_loss(std::span<const double> pred, std::span<const double> target);
double loss_value(Loss loss, std::span<const double> pred, std::span<const double> target);

// dL/dpred for the mean batch loss; the MAE subgradient at zero is zero.
std::vector<double> loss_gradient(Loss loss, std::span<const double> pred,
                                  std::span<const double> target);

// --- reverse mode -------------------------------------------------------

// Gradient of the mean batch loss with respect to every trainable
// parameter. Runs a training-mode forward (model must be in Training mode)
// and backpropagates through the recorded trace.
struct LossEval {
  double loss = 0.0;
  std::vector<double> gradient;
  std::vector<double> predictions;
};
LossEval loss_and_gradient(CnnModel& model, const Batch& windows,
                           std::span<const double> targets, Loss loss);

// Backpropagate dL/d(output) through a recorded trace; returns dL/dtheta.
std::vector<double> backprop(const CnnModel& model, const ForwardTrace& trace,
                             const Batch& dout);

}  // namespace turbuq::ml
