#include "turbuq/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "turbuq/rng.hpp"

namespace turbuq::ml {

namespace {

std::span<const double> layer_params(const CnnModel& m, const LayerSpec& l) {
  return std::span<const double>(m.params).subspan(static_cast<std::size_t>(l.param_offset),
                                                   static_cast<std::size_t>(l.param_count()));
}

// Single dispatch point shared by training, inference, and const prediction.
// Running statistics are only touched when mode == Training.
Batch run_forward(const CnnModel& m, const Batch& input, Mode mode, ForwardTrace* trace,
                  std::vector<double>* running_mean, std::vector<double>* running_var) {
  if (input.count <= 0) throw EmptyBatch("forward: empty batch");
  if (input.channels != m.arch.input_channels || input.len != m.arch.input_len)
    throw ShapeMismatch("forward: input is " + std::to_string(input.channels) + "x" +
                        std::to_string(input.len) + ", expected " +
                        std::to_string(m.arch.input_channels) + "x" +
                        std::to_string(m.arch.input_len));

  Batch cur = input;
  if (trace) {
    trace->layers.clear();
    trace->layers.resize(m.arch.layers.size());
  }
  for (std::size_t li = 0; li < m.arch.layers.size(); ++li) {
    const LayerSpec& l = m.arch.layers[li];
    LayerTrace* lt = trace ? &trace->layers[li] : nullptr;
    if (lt) lt->input = cur;
    switch (l.kind) {
      case LayerKind::Conv1D: {
        auto p = layer_params(m, l);
        const std::size_t nw = static_cast<std::size_t>(l.out_ch) * l.in_ch * l.kernel;
        cur = conv1d_forward(cur, p.first(nw), p.subspan(nw), l.out_ch, l.kernel);
        break;
      }
      case LayerKind::BatchNorm: {
        auto p = layer_params(m, l);
        auto gamma = p.first(static_cast<std::size_t>(l.channels));
        auto beta = p.subspan(static_cast<std::size_t>(l.channels));
        if (mode == Mode::Training) {
          auto rm = std::span<double>(*running_mean)
                        .subspan(static_cast<std::size_t>(l.stat_offset), l.channels);
          auto rv = std::span<double>(*running_var)
                        .subspan(static_cast<std::size_t>(l.stat_offset), l.channels);
          cur = batchnorm_forward_train(cur, gamma, beta, rm, rv, m.bn_momentum, m.bn_epsilon,
                                        lt ? &lt->bn_mean : nullptr, lt ? &lt->bn_var : nullptr,
                                        lt ? &lt->bn_xhat : nullptr);
        } else {
          auto rm = std::span<const double>(m.running_mean)
                        .subspan(static_cast<std::size_t>(l.stat_offset), l.channels);
          auto rv = std::span<const double>(m.running_var)
                        .subspan(static_cast<std::size_t>(l.stat_offset), l.channels);
          cur = batchnorm_forward_infer(cur, gamma, beta, rm, rv, m.bn_epsilon);
        }
        break;
      }
      case LayerKind::Relu:
        cur = relu_forward(cur);
        break;
      case LayerKind::MaxPool:
        cur = maxpool1d_forward(cur, l.window, l.stride, lt ? &lt->pool_argmax : nullptr);
        break;
      case LayerKind::Flatten:
        cur = flatten_forward(cur);
        break;
      case LayerKind::Dense: {
        auto p = layer_params(m, l);
        const std::size_t nw = static_cast<std::size_t>(l.out) * l.in;
        cur = dense_forward(cur, p.first(nw), p.subspan(nw), l.out);
        break;
      }
    }
  }
  if (trace) trace->output = cur;
  return cur;
}

}  // namespace

int LayerSpec::param_count() const {
  switch (kind) {
    case LayerKind::Conv1D:
      return out_ch * (in_ch * kernel + 1);
    case LayerKind::BatchNorm:
      return 2 * channels;
    case LayerKind::Dense:
      return out * (in + 1);
    default:
      return 0;
  }
}

LayerSpec LayerSpec::conv1d(int in_ch, int out_ch, int kernel) {
  if (in_ch < 1 || out_ch < 1 || kernel < 1) throw InvalidConfig("conv1d: non-positive shape");
  LayerSpec l;
  l.kind = LayerKind::Conv1D;
  l.in_ch = in_ch;
  l.out_ch = out_ch;
  l.kernel = kernel;
  return l;
}

LayerSpec LayerSpec::batchnorm(int channels) {
  if (channels < 1) throw InvalidConfig("batchnorm: non-positive channel count");
  LayerSpec l;
  l.kind = LayerKind::BatchNorm;
  l.channels = channels;
  return l;
}

LayerSpec LayerSpec::relu() {
  LayerSpec l;
  l.kind = LayerKind::Relu;
  return l;
}

LayerSpec LayerSpec::maxpool(int window, int stride) {
  if (window < 1 || stride < 1) throw InvalidConfig("maxpool: non-positive window or stride");
  LayerSpec l;
  l.kind = LayerKind::MaxPool;
  l.window = window;
  l.stride = stride;
  return l;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec l;
  l.kind = LayerKind::Flatten;
  return l;
}

LayerSpec LayerSpec::dense(int in, int out) {
  if (in < 1 || out < 1) throw InvalidConfig("dense: non-positive shape");
  LayerSpec l;
  l.kind = LayerKind::Dense;
  l.in = in;
  l.out = out;
  return l;
}

CnnArchitecture CnnArchitecture::conv_net(int input_len, int c1, int c2, int hidden) {
  if (c1 < 1 || c2 < 1 || hidden < 1) throw InvalidConfig("conv_net: non-positive width");
  const int after_convs = input_len - 4;  // two valid k=3 convolutions
  if (after_convs < 2) throw InvalidConfig("conv_net: input_len must be at least 6");
  const int pooled = after_convs / 2;
  CnnArchitecture a;
  a.input_channels = 1;
  a.input_len = input_len;
  a.layers = {
      LayerSpec::conv1d(1, c1, 3),  LayerSpec::batchnorm(c1),         LayerSpec::relu(),
      LayerSpec::conv1d(c1, c2, 3), LayerSpec::batchnorm(c2),         LayerSpec::relu(),
      LayerSpec::maxpool(2, 2),     LayerSpec::flatten(),
      LayerSpec::dense(c2 * pooled, hidden),
      LayerSpec::relu(),            LayerSpec::dense(hidden, 1),
  };
  a.assign_offsets();
  return a;
}

int CnnArchitecture::param_count() const {
  int n = 0;
  for (const LayerSpec& l : layers) n += l.param_count();
  return n;
}

int CnnArchitecture::stat_count() const {
  int n = 0;
  for (const LayerSpec& l : layers)
    if (l.kind == LayerKind::BatchNorm) n += l.channels;
  return n;
}

void CnnArchitecture::assign_offsets() {
  int p = 0, s = 0;
  for (LayerSpec& l : layers) {
    l.param_offset = p;
    l.stat_offset = s;
    p += l.param_count();
    if (l.kind == LayerKind::BatchNorm) s += l.channels;
  }
}

CnnModel CnnModel::init(const CnnArchitecture& arch, std::uint64_t seed) {
  CnnModel m;
  m.arch = arch;
  m.arch.assign_offsets();
  m.params.assign(static_cast<std::size_t>(m.arch.param_count()), 0.0);
  m.running_mean.assign(static_cast<std::size_t>(m.arch.stat_count()), 0.0);
  m.running_var.assign(static_cast<std::size_t>(m.arch.stat_count()), 1.0);

  Rng rng(seed);
  for (const LayerSpec& l : m.arch.layers) {
    double* slice = m.params.data() + l.param_offset;
    switch (l.kind) {
      case LayerKind::Conv1D: {
        const double bound = std::sqrt(1.0 / (l.in_ch * l.kernel));
        for (int i = 0; i < l.param_count(); ++i) slice[i] = rng.uniform(-bound, bound);
        break;
      }
      case LayerKind::Dense: {
        const double bound = std::sqrt(1.0 / l.in);
        for (int i = 0; i < l.param_count(); ++i) slice[i] = rng.uniform(-bound, bound);
        break;
      }
      case LayerKind::BatchNorm:
        for (int c = 0; c < l.channels; ++c) {
          slice[c] = 1.0;              // gamma
          slice[l.channels + c] = 0.0;  // beta
        }
        break;
      default:
        break;
    }
  }
  return m;
}

Batch CnnModel::forward(const Batch& input, ForwardTrace* trace) {
  return run_forward(*this, input, mode, trace, &running_mean, &running_var);
}

double CnnModel::forward(std::span<const double> window) const {
  if (arch.input_channels != 1)
    throw ShapeMismatch("forward(window): architecture is not single-channel");
  if (static_cast<int>(window.size()) != arch.input_len)
    throw ShapeMismatch("forward(window): got " + std::to_string(window.size()) +
                        " samples, expected " + std::to_string(arch.input_len));
  Batch b(1, 1, arch.input_len);
  std::copy(window.begin(), window.end(), b.v.begin());
  Batch out = run_forward(*this, b, Mode::Inference, nullptr, nullptr, nullptr);
  return out.v[0];
}

int param_count(const CnnModel& model) { return model.arch.param_count(); }

Batch conv1d_forward(const Batch& x, std::span<const double> weights,
                     std::span<const double> bias, int out_ch, int kernel) {
  if (x.len < kernel)
    throw InputTooShort("conv1d: length " + std::to_string(x.len) + " < kernel " +
                        std::to_string(kernel));
  const int out_len = x.len - kernel + 1;
  Batch y(x.count, out_ch, out_len);
  for (int s = 0; s < x.count; ++s)
    for (int oc = 0; oc < out_ch; ++oc)
      for (int i = 0; i < out_len; ++i) {
        double acc = bias[oc];
        for (int ic = 0; ic < x.channels; ++ic)
          for (int k = 0; k < kernel; ++k)
            acc += weights[(static_cast<std::size_t>(oc) * x.channels + ic) * kernel + k] *
                   x.at(s, ic, i + k);
        y.at(s, oc, i) = acc;
      }
  return y;
}

Batch batchnorm_forward_train(const Batch& x, std::span<const double> gamma,
                              std::span<const double> beta, std::span<double> running_mean,
                              std::span<double> running_var, double momentum, double eps,
                              std::vector<double>* mean_out, std::vector<double>* var_out,
                              Batch* xhat_out) {
  if (x.count < 2) throw DegenerateBatch("batchnorm: training batch needs at least 2 samples");
  const double n = static_cast<double>(x.count) * x.len;
  std::vector<double> mean(x.channels, 0.0), var(x.channels, 0.0);
  for (int c = 0; c < x.channels; ++c) {
    double acc = 0.0;
    for (int s = 0; s < x.count; ++s)
      for (int i = 0; i < x.len; ++i) acc += x.at(s, c, i);
    mean[c] = acc / n;
    double sq = 0.0;
    for (int s = 0; s < x.count; ++s)
      for (int i = 0; i < x.len; ++i) {
        const double d = x.at(s, c, i) - mean[c];
        sq += d * d;
      }
    var[c] = sq / n;  // biased
    running_mean[c] = (1.0 - momentum) * running_mean[c] + momentum * mean[c];
    running_var[c] = (1.0 - momentum) * running_var[c] + momentum * var[c];
  }
  Batch y(x.count, x.channels, x.len);
  Batch xhat(x.count, x.channels, x.len);
  for (int c = 0; c < x.channels; ++c) {
    const double inv_std = 1.0 / std::sqrt(var[c] + eps);
    for (int s = 0; s < x.count; ++s)
      for (int i = 0; i < x.len; ++i) {
        const double h = (x.at(s, c, i) - mean[c]) * inv_std;
        xhat.at(s, c, i) = h;
        y.at(s, c, i) = gamma[c] * h + beta[c];
      }
  }
  if (mean_out) *mean_out = std::move(mean);
  if (var_out) *var_out = std::move(var);
  if (xhat_out) *xhat_out = std::move(xhat);
  return y;
}

Batch batchnorm_forward_infer(const Batch& x, std::span<const double> gamma,
                              std::span<const double> beta, std::span<const double> running_mean,
                              std::span<const double> running_var, double eps) {
  Batch y(x.count, x.channels, x.len);
  for (int c = 0; c < x.channels; ++c) {
    const double inv_std = 1.0 / std::sqrt(running_var[c] + eps);
    for (int s = 0; s < x.count; ++s)
      for (int i = 0; i < x.len; ++i)
        y.at(s, c, i) = gamma[c] * (x.at(s, c, i) - running_mean[c]) * inv_std + beta[c];
  }
  return y;
}

Batch relu_forward(const Batch& x) {
  Batch y = x;
  for (double& v : y.v) v = std::max(0.0, v);
  return y;
}

Batch maxpool1d_forward(const Batch& x, int window, int stride, std::vector<int>* argmax) {
  if (x.len < window)
    throw InputTooShort("maxpool: length " + std::to_string(x.len) + " < window " +
                        std::to_string(window));
  const int out_len = (x.len - window) / stride + 1;
  Batch y(x.count, x.channels, out_len);
  if (argmax) argmax->assign(y.v.size(), 0);
  for (int s = 0; s < x.count; ++s)
    for (int c = 0; c < x.channels; ++c)
      for (int i = 0; i < out_len; ++i) {
        int best = i * stride;
        double best_v = x.at(s, c, best);
        for (int k = 1; k < window; ++k) {
          const double v = x.at(s, c, i * stride + k);
          if (v > best_v) {  // first maximum wins ties
            best_v = v;
            best = i * stride + k;
          }
        }
        y.at(s, c, i) = best_v;
        if (argmax)
          (*argmax)[(static_cast<std::size_t>(s) * x.channels + c) * out_len + i] = best;
      }
  return y;
}

Batch flatten_forward(const Batch& x) {
  Batch y(x.count, 1, x.channels * x.len);
  for (int s = 0; s < x.count; ++s)
    for (int c = 0; c < x.channels; ++c)
      for (int i = 0; i < x.len; ++i) y.at(s, 0, c * x.len + i) = x.at(s, c, i);
  return y;
}

Batch dense_forward(const Batch& x, std::span<const double> weights,
                    std::span<const double> bias, int out) {
  if (x.channels != 1) throw ShapeMismatch("dense: input must be flattened");
  const int in = x.len;
  Batch y(x.count, 1, out);
  for (int s = 0; s < x.count; ++s)
    for (int o = 0; o < out; ++o) {
      double acc = bias[o];
      for (int j = 0; j < in; ++j)
        acc += weights[static_cast<std::size_t>(o) * in + j] * x.at(s, 0, j);
      y.at(s, 0, o) = acc;
    }
  return y;
}

namespace {

void check_loss_args(std::span<const double> pred, std::span<const double> target) {
  if (pred.empty() || target.empty()) throw EmptyBatch("loss: empty input");
  if (pred.size() != target.size())
    throw LengthMismatch("loss: " + std::to_string(pred.size()) + " predictions vs " +
                         std::to_string(target.size()) + " targets");
}

}  // namespace

double mae_loss(std::span<const double> pred, std::span<const double> target) {
  check_loss_args(pred, target);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += std::fabs(pred[i] - target[i]);
  return acc / static_cast<double>(pred.size());
}

double mse_loss(std::span<const double> pred, std::span<const double> target) {
  check_loss_args(pred, target);
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

double loss_value(Loss loss, std::span<const double> pred, std::span<const double> target) {
  return loss == Loss::Mae ? mae_loss(pred, target) : mse_loss(pred, target);
}

std::vector<double> loss_gradient(Loss loss, std::span<const double> pred,
                                  std::span<const double> target) {
  check_loss_args(pred, target);
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  std::vector<double> g(pred.size(), 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    if (loss == Loss::Mae)
      g[i] = d > 0.0 ? inv_n : (d < 0.0 ? -inv_n : 0.0);
    else
      g[i] = 2.0 * d * inv_n;
  }
  return g;
}

std::vector<double> backprop(const CnnModel& model, const ForwardTrace& trace,
                             const Batch& dout) {
  if (trace.layers.size() != model.arch.layers.size())
    throw ShapeMismatch("backprop: trace does not match architecture");
  std::vector<double> dtheta(model.params.size(), 0.0);
  Batch dcur = dout;

  for (std::size_t li = model.arch.layers.size(); li-- > 0;) {
    const LayerSpec& l = model.arch.layers[li];
    const LayerTrace& lt = trace.layers[li];
    const Batch& x = lt.input;
    switch (l.kind) {
      case LayerKind::Conv1D: {
        auto w = layer_params(model, l);
        const int out_len = x.len - l.kernel + 1;
        Batch dx(x.count, x.channels, x.len);
        double* dw = dtheta.data() + l.param_offset;
        double* db = dw + static_cast<std::size_t>(l.out_ch) * l.in_ch * l.kernel;
        for (int s = 0; s < x.count; ++s)
          for (int oc = 0; oc < l.out_ch; ++oc)
            for (int i = 0; i < out_len; ++i) {
              const double g = dcur.at(s, oc, i);
              db[oc] += g;
              for (int ic = 0; ic < x.channels; ++ic)
                for (int k = 0; k < l.kernel; ++k) {
                  const std::size_t wi =
                      (static_cast<std::size_t>(oc) * x.channels + ic) * l.kernel + k;
                  dw[wi] += g * x.at(s, ic, i + k);
                  dx.at(s, ic, i + k) += g * w[wi];
                }
            }
        dcur = std::move(dx);
        break;
      }
      case LayerKind::BatchNorm: {
        auto p = layer_params(model, l);
        const double n = static_cast<double>(x.count) * x.len;
        Batch dx(x.count, x.channels, x.len);
        double* dgamma = dtheta.data() + l.param_offset;
        double* dbeta = dgamma + l.channels;
        for (int c = 0; c < l.channels; ++c) {
          const double inv_std = 1.0 / std::sqrt(lt.bn_var[c] + model.bn_epsilon);
          double sum_dy = 0.0, sum_dy_xhat = 0.0;
          for (int s = 0; s < x.count; ++s)
            for (int i = 0; i < x.len; ++i) {
              const double g = dcur.at(s, c, i);
              sum_dy += g;
              sum_dy_xhat += g * lt.bn_xhat.at(s, c, i);
            }
          dgamma[c] += sum_dy_xhat;
          dbeta[c] += sum_dy;
          // dL/dx through the batch statistics:
          // dx = gamma*inv_std/n * (n*dy - sum(dy) - xhat*sum(dy*xhat))
          const double scale = p[c] * inv_std / n;
          for (int s = 0; s < x.count; ++s)
            for (int i = 0; i < x.len; ++i)
              dx.at(s, c, i) = scale * (n * dcur.at(s, c, i) - sum_dy -
                                        lt.bn_xhat.at(s, c, i) * sum_dy_xhat);
        }
        dcur = std::move(dx);
        break;
      }
      case LayerKind::Relu: {
        Batch dx(x.count, x.channels, x.len);
        for (std::size_t i = 0; i < x.v.size(); ++i) dx.v[i] = x.v[i] > 0.0 ? dcur.v[i] : 0.0;
        dcur = std::move(dx);
        break;
      }
      case LayerKind::MaxPool: {
        const int out_len = (x.len - l.window) / l.stride + 1;
        Batch dx(x.count, x.channels, x.len);
        for (int s = 0; s < x.count; ++s)
          for (int c = 0; c < x.channels; ++c)
            for (int i = 0; i < out_len; ++i) {
              const int src =
                  lt.pool_argmax[(static_cast<std::size_t>(s) * x.channels + c) * out_len + i];
              dx.at(s, c, src) += dcur.at(s, c, i);
            }
        dcur = std::move(dx);
        break;
      }
      case LayerKind::Flatten: {
        Batch dx(x.count, x.channels, x.len);
        for (int s = 0; s < x.count; ++s)
          for (int c = 0; c < x.channels; ++c)
            for (int i = 0; i < x.len; ++i) dx.at(s, c, i) = dcur.at(s, 0, c * x.len + i);
        dcur = std::move(dx);
        break;
      }
      case LayerKind::Dense: {
        auto w = layer_params(model, l);
        Batch dx(x.count, 1, l.in);
        double* dw = dtheta.data() + l.param_offset;
        double* db = dw + static_cast<std::size_t>(l.out) * l.in;
        for (int s = 0; s < x.count; ++s)
          for (int o = 0; o < l.out; ++o) {
            const double g = dcur.at(s, 0, o);
            db[o] += g;
            for (int j = 0; j < l.in; ++j) {
              dw[static_cast<std::size_t>(o) * l.in + j] += g * x.at(s, 0, j);
              dx.at(s, 0, j) += g * w[static_cast<std::size_t>(o) * l.in + j];
            }
          }
        dcur = std::move(dx);
        break;
      }
    }
  }
  return dtheta;
}

LossEval loss_and_gradient(CnnModel& model, const Batch& windows,
                           std::span<const double> targets, Loss loss) {
  if (model.mode != Mode::Training)
    throw InvalidConfig("loss_and_gradient: model must be in training mode");
  if (static_cast<int>(targets.size()) != windows.count)
    throw LengthMismatch("loss_and_gradient: " + std::to_string(windows.count) +
                         " windows vs " + std::to_string(targets.size()) + " targets");

  ForwardTrace trace;
  Batch out = model.forward(windows, &trace);
  if (out.channels != 1 || out.len != 1)
    throw ShapeMismatch("loss_and_gradient: network output is not scalar");

  LossEval ev;
  ev.predictions = out.v;
  ev.loss = loss_value(loss, ev.predictions, targets);
  std::vector<double> dpred = loss_gradient(loss, ev.predictions, targets);
  Batch dout(out.count, 1, 1);
  dout.v = std::move(dpred);
  ev.gradient = backprop(model, trace, dout);
  return ev;
}

}  // namespace turbuq::ml
