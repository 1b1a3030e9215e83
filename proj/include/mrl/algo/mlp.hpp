#pragma once

#include <span>
#include <vector>

#include "mrl/rng.hpp"

namespace mrl::algo {

// Fully connected ReLU stack with a linear output layer. Parameters live in
// one flat array, layer-major: for each layer, the weight matrix row-major
// (n_out x n_in) followed by the bias vector (n_out).
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> layer_sizes);

  void init_weights(Rng& rng);  // He-uniform fan-in scaling

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int layer_count() const { return static_cast<int>(sizes_.size()) - 1; }
  size_t param_count() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::vector<double> forward(std::span<const double> input) const;

  // Parameter gradients of sum(out_grad . output) for one input, exact
  // reverse mode. Layout matches params().
  std::vector<double> backward(std::span<const double> input,
                               std::span<const double> out_grad) const;

  // Batched pass; rows of `inputs` are samples. The trace keeps the
  // activations needed by backward_batch.
  struct BatchTrace {
    int batch = 0;
    std::vector<std::vector<double>> acts;  // acts[l] is batch x sizes_[l]
  };
  void forward_batch(std::span<const double> inputs, int batch, BatchTrace* trace,
                     std::vector<double>* outputs) const;
  void backward_batch(const BatchTrace& trace, std::span<const double> out_grad,
                      std::vector<double>* param_grad) const;

  bool params_finite() const;

 private:
  size_t offset_of(int layer) const;

  std::vector<int> sizes_;
  std::vector<double> params_;
};

// Per-parameter adaptive step: sq = decay*sq + (1-decay)*g^2,
// p -= lr * g / (sqrt(sq) + damping).
class RmsProp {
 public:
  RmsProp(size_t n, double lr, double decay, double damping)
      : sq_(n, 0.0), lr_(lr), decay_(decay), damping_(damping) {}

  void step(std::vector<double>& params, const std::vector<double>& grad);
  double learning_rate() const { return lr_; }

 private:
  std::vector<double> sq_;
  double lr_, decay_, damping_;
};

}  // namespace mrl::algo
