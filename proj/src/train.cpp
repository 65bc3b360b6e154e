#include "turbuq/train.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "turbuq/rng.hpp"

namespace turbuq::ml {

void TrainingConfig::validate() const {
  const double sum = train_fraction + val_fraction + test_fraction;
  if (std::fabs(sum - 1.0) > 1e-9)
    throw InvalidConfig("split fractions sum to " + std::to_string(sum) + ", expected 1");
  if (train_fraction <= 0.0 || val_fraction < 0.0 || test_fraction < 0.0)
    throw InvalidConfig("split fractions must be non-negative with a positive train share");
  if (patience < 1) throw InvalidConfig("patience must be at least 1");
  if (!(learning_rate > 0.0)) throw InvalidConfig("learning_rate must be positive");
  if (batch_size < 2) throw InvalidConfig("batch_size must be at least 2");
  if (max_epochs < 1) throw InvalidConfig("max_epochs must be at least 1");
}

EarlyStopping::EarlyStopping(int patience_epochs)
    : patience(patience_epochs), best_loss(std::numeric_limits<double>::infinity()) {
  if (patience < 1) throw InvalidConfig("patience must be at least 1");
}

bool EarlyStopping::observe(int epoch, double val_loss) {
  if (val_loss < best_loss) {
    best_loss = val_loss;
    best_epoch = epoch;
    return true;
  }
  return false;
}

bool EarlyStopping::should_stop(int epoch) const {
  return best_epoch >= 0 && epoch - best_epoch >= patience;
}

namespace {

Batch pack_windows(std::span<const WindowSample> samples, std::span<const int> order,
                   std::size_t begin, std::size_t end, int input_len) {
  Batch b(static_cast<int>(end - begin), 1, input_len);
  for (std::size_t s = begin; s < end; ++s) {
    const WindowSample& ws = samples[static_cast<std::size_t>(order[s])];
    if (static_cast<int>(ws.window.size()) != input_len)
      throw ShapeMismatch("train: window of length " + std::to_string(ws.window.size()) +
                          ", model expects " + std::to_string(input_len));
    std::copy(ws.window.begin(), ws.window.end(),
              b.v.begin() + static_cast<std::ptrdiff_t>((s - begin) * input_len));
  }
  return b;
}

}  // namespace

double evaluate_loss(const CnnModel& model, std::span<const WindowSample> samples, Loss loss) {
  if (samples.empty()) throw EmptyBatch("evaluate_loss: no samples");
  std::vector<double> pred(samples.size()), target(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    pred[i] = model.forward(samples[i].window);
    target[i] = samples[i].target;
  }
  return loss_value(loss, pred, target);
}

TrainResult train(CnnModel model, std::span<const WindowSample> train_set,
                  std::span<const WindowSample> val_set, const TrainingConfig& config) {
  config.validate();
  if (train_set.empty()) throw EmptyPartition("train: empty training partition");
  if (val_set.empty()) throw EmptyPartition("train: empty validation partition");

  const int input_len = model.arch.input_len;
  Rng rng(config.seed);
  AdamState adam(model.params.size());
  const AdamConfig adam_cfg{config.learning_rate, 0.9, 0.999, 1e-8};

  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  EarlyStopping stopper(config.patience);
  TrainingHistory history;
  std::vector<double> best_params = model.params;
  std::vector<double> best_mean = model.running_mean;
  std::vector<double> best_var = model.running_var;

  std::vector<double> targets;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.shuffle(order);
    model.mode = Mode::Training;
    double loss_sum = 0.0;
    std::size_t seen = 0;
    const std::size_t n = train_set.size();
    const std::size_t bs = static_cast<std::size_t>(config.batch_size);
    for (std::size_t begin = 0; begin < n;) {
      std::size_t end = std::min(begin + bs, n);
      if (n - end == 1) end = n;  // fold a trailing singleton into this batch
      Batch windows = pack_windows(train_set, order, begin, end, input_len);
      targets.resize(end - begin);
      for (std::size_t s = begin; s < end; ++s)
        targets[s - begin] = train_set[static_cast<std::size_t>(order[s])].target;
      LossEval ev = loss_and_gradient(model, windows, targets, config.loss);
      adam_step(model.params, ev.gradient, adam, adam_cfg);
      loss_sum += ev.loss * static_cast<double>(end - begin);
      seen += end - begin;
      begin = end;
    }
    history.train_loss.push_back(loss_sum / static_cast<double>(seen));

    model.mode = Mode::Inference;
    const double val = evaluate_loss(model, val_set, config.loss);
    history.val_loss.push_back(val);

    if (stopper.observe(epoch, val)) {
      best_params = model.params;
      best_mean = model.running_mean;
      best_var = model.running_var;
    }
    if (stopper.should_stop(epoch)) {
      history.stopped_early = true;
      break;
    }
  }

  history.best_epoch = stopper.best_epoch;
  model.params = std::move(best_params);
  model.running_mean = std::move(best_mean);
  model.running_var = std::move(best_var);
  model.mode = Mode::Inference;
  return {std::move(model), std::move(history)};
}

}  // namespace turbuq::ml
