#pragma once

// Mini-batch trainer: shuffled epochs, Adam updates, inference-mode
// validation, early stopping with best-epoch parameter restore.

#include <cstdint>
#include <span>
#include <vector>

#include "turbuq/nn.hpp"
#include "turbuq/optimizer.hpp"

namespace turbuq::ml {

// One standardized training example: an input window and its scalar target.
struct WindowSample {
  std::vector<double> window;
  double target = 0.0;
};

struct TrainingConfig {
  double learning_rate = 1e-3;
  int patience = 10;
  double train_fraction = 0.75;
  double val_fraction = 0.05;
  double test_fraction = 0.20;
  int max_epochs = 1000;
  int batch_size = 32;
  std::uint64_t seed = 0;
  Loss loss = Loss::Mae;

  // InvalidConfig unless fractions sum to 1, patience >= 1,
  // learning_rate > 0, batch_size >= 2, max_epochs >= 1.
  void validate() const;
};

// Tracks the best validation loss seen so far; improvement is strict.
struct EarlyStopping {
  int patience;
  double best_loss;
  int best_epoch = -1;

  explicit EarlyStopping(int patience);

  // Returns true when `val_loss` strictly improves on the best so far.
  bool observe(int epoch, double val_loss);
  // True once `epoch` is at least `patience` epochs past the best one.
  bool should_stop(int epoch) const;
};

struct TrainingHistory {
  std::vector<double> train_loss;  // per epoch, sample-weighted batch mean
  std::vector<double> val_loss;    // per epoch, inference mode
  int best_epoch = -1;
  bool stopped_early = false;
};

struct TrainResult {
  CnnModel model;  // best-validation-epoch parameters and running stats
  TrainingHistory history;
};

// Epoch loop: shuffle(seed) -> mini-batches -> backprop -> Adam. A trailing
// batch of one sample is folded into the previous batch so batch norm always
// sees at least two. EmptyPartition when either split is empty; ShapeMismatch
// when a window does not match the model input length.
TrainResult train(CnnModel model, std::span<const WindowSample> train_set,
                  std::span<const WindowSample> val_set, const TrainingConfig& config);

// Mean loss of the model over `samples` in inference mode.
double evaluate_loss(const CnnModel& model, std::span<const WindowSample> samples, Loss loss);

}  // namespace turbuq::ml
