#include "mrl/algo/mlp.hpp"

#include <cmath>

#include "mrl/errors.hpp"

namespace mrl::algo {

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw Error("mlp needs at least input and output sizes");
  size_t count = 0;
  for (size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw Error("mlp layer sizes must be positive");
    count += static_cast<size_t>(sizes_[l] + 1) * sizes_[l + 1];
  }
  params_.assign(count, 0.0);
}

size_t Mlp::offset_of(int layer) const {
  size_t off = 0;
  for (int l = 0; l < layer; ++l)
    off += static_cast<size_t>(sizes_[l] + 1) * sizes_[l + 1];
  return off;
}

void Mlp::init_weights(Rng& rng) {
  for (int l = 0; l < layer_count(); ++l) {
    const int n_in = sizes_[l], n_out = sizes_[l + 1];
    const double bound = std::sqrt(6.0 / n_in);
    double* w = params_.data() + offset_of(l);
    for (int i = 0; i < n_out * n_in; ++i) w[i] = rng.uniform(-bound, bound);
    double* b = w + static_cast<size_t>(n_out) * n_in;
    for (int i = 0; i < n_out; ++i) b[i] = 0.0;
  }
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_dim())
    throw Error("mlp forward: input size " + std::to_string(input.size()) +
                ", expected " + std::to_string(input_dim()));
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  for (int l = 0; l < layer_count(); ++l) {
    const int n_in = sizes_[l], n_out = sizes_[l + 1];
    const double* w = params_.data() + offset_of(l);
    const double* b = w + static_cast<size_t>(n_out) * n_in;
    next.assign(n_out, 0.0);
    for (int o = 0; o < n_out; ++o) {
      double acc = b[o];
      const double* row = w + static_cast<size_t>(o) * n_in;
      for (int i = 0; i < n_in; ++i) acc += row[i] * cur[i];
      next[o] = (l + 1 < layer_count() && acc < 0.0) ? 0.0 : acc;  // ReLU on hidden
    }
    cur.swap(next);
  }
  return cur;
}

std::vector<double> Mlp::backward(std::span<const double> input,
                                  std::span<const double> out_grad) const {
  BatchTrace trace;
  std::vector<double> outputs;
  forward_batch(input, 1, &trace, &outputs);
  std::vector<double> grad;
  backward_batch(trace, out_grad, &grad);
  return grad;
}

void Mlp::forward_batch(std::span<const double> inputs, int batch, BatchTrace* trace,
                        std::vector<double>* outputs) const {
  if (static_cast<int>(inputs.size()) != batch * input_dim())
    throw Error("mlp forward_batch: bad input size");
  trace->batch = batch;
  trace->acts.resize(sizes_.size());  // inner buffers keep their capacity
  trace->acts[0].assign(inputs.begin(), inputs.end());

  for (int l = 0; l < layer_count(); ++l) {
    const int n_in = sizes_[l], n_out = sizes_[l + 1];
    const bool hidden = l + 1 < layer_count();
    const double* w = params_.data() + offset_of(l);
    const double* b = w + static_cast<size_t>(n_out) * n_in;
    const std::vector<double>& in = trace->acts[l];
    std::vector<double>& out = trace->acts[l + 1];
    out.assign(static_cast<size_t>(batch) * n_out, 0.0);
    for (int s = 0; s < batch; ++s) {
      const double* x = in.data() + static_cast<size_t>(s) * n_in;
      double* y = out.data() + static_cast<size_t>(s) * n_out;
      for (int o = 0; o < n_out; ++o) {
        double acc = b[o];
        const double* row = w + static_cast<size_t>(o) * n_in;
        for (int i = 0; i < n_in; ++i) acc += row[i] * x[i];
        y[o] = (hidden && acc < 0.0) ? 0.0 : acc;
      }
    }
  }
  if (outputs != nullptr) *outputs = trace->acts.back();
}

void Mlp::backward_batch(const BatchTrace& trace, std::span<const double> out_grad,
                         std::vector<double>* param_grad) const {
  const int batch = trace.batch;
  if (static_cast<int>(out_grad.size()) != batch * output_dim())
    throw Error("mlp backward_batch: bad output gradient size");
  param_grad->assign(params_.size(), 0.0);

  std::vector<double> delta(out_grad.begin(), out_grad.end());
  std::vector<double> delta_prev;
  for (int l = layer_count() - 1; l >= 0; --l) {
    const int n_in = sizes_[l], n_out = sizes_[l + 1];
    const double* w = params_.data() + offset_of(l);
    double* gw = param_grad->data() + offset_of(l);
    double* gb = gw + static_cast<size_t>(n_out) * n_in;
    const std::vector<double>& in = trace.acts[l];

    for (int s = 0; s < batch; ++s) {
      const double* x = in.data() + static_cast<size_t>(s) * n_in;
      const double* d = delta.data() + static_cast<size_t>(s) * n_out;
      for (int o = 0; o < n_out; ++o) {
        const double dv = d[o];
        if (dv == 0.0) continue;
        double* grow = gw + static_cast<size_t>(o) * n_in;
        for (int i = 0; i < n_in; ++i) grow[i] += dv * x[i];
        gb[o] += dv;
      }
    }

    if (l > 0) {
      delta_prev.assign(static_cast<size_t>(batch) * n_in, 0.0);
      for (int s = 0; s < batch; ++s) {
        const double* d = delta.data() + static_cast<size_t>(s) * n_out;
        const double* act = in.data() + static_cast<size_t>(s) * n_in;
        double* dp = delta_prev.data() + static_cast<size_t>(s) * n_in;
        for (int o = 0; o < n_out; ++o) {
          const double dv = d[o];
          if (dv == 0.0) continue;
          const double* row = w + static_cast<size_t>(o) * n_in;
          for (int i = 0; i < n_in; ++i) dp[i] += dv * row[i];
        }
        // ReLU: activations are zero exactly where the pre-activation was
        // clipped, so the mask can be read off the stored activation.
        for (int i = 0; i < n_in; ++i)
          if (act[i] <= 0.0) dp[i] = 0.0;
      }
      delta.swap(delta_prev);
    }
  }
}

bool Mlp::params_finite() const {
  for (double p : params_)
    if (!std::isfinite(p)) return false;
  return true;
}

void RmsProp::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (params.size() != sq_.size() || grad.size() != sq_.size())
    throw Error("rmsprop: size mismatch");
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    sq_[i] = decay_ * sq_[i] + (1.0 - decay_) * g * g;
    params[i] -= lr_ * g / (std::sqrt(sq_[i]) + damping_);
  }
}

}  // namespace mrl::algo
