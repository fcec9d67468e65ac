#pragma once

#include <span>
#include <vector>

#include "fracdose/rng.hpp"

namespace fracdose::dqn {

// Fully-connected action-value network with ReLU hidden layers and a linear
// output. Weights live in one flat array (per layer: W row-major [out x in],
// then the bias), which keeps the optimizer, checkpoints and the
// finite-difference tests simple.
class QNetwork {
  public:
    explicit QNetwork(std::vector<int> dims);  // {input, hidden..., output}

    // Kaiming-uniform W ~ U(-sqrt(6/fan_in), sqrt(6/fan_in)), biases zero.
    // Consumes one rng draw per weight matrix entry, layer by layer.
    void init_weights(Rng& rng);

    const std::vector<int>& dims() const { return dims_; }
    int input_dim() const { return dims_.front(); }
    int output_dim() const { return dims_.back(); }
    int layer_count() const { return static_cast<int>(dims_.size()) - 1; }
    size_t parameter_count() const { return weights_.size(); }

    std::vector<double>& weights() { return weights_; }
    const std::vector<double>& weights() const { return weights_; }
    size_t weight_offset(int layer) const { return w_offset_[layer]; }
    size_t bias_offset(int layer) const { return b_offset_[layer]; }

    std::vector<double> forward(std::span<const double> input) const;

  private:
    friend struct BatchWorkspace;
    std::vector<int> dims_;
    std::vector<size_t> w_offset_, b_offset_;
    std::vector<double> weights_;
};

// Reusable per-batch activation and gradient buffers.
struct BatchWorkspace {
    int batch = 0;
    std::vector<std::vector<double>> act;    // act[l]: batch x dims[l]
    std::vector<std::vector<double>> delta;  // delta[l]: batch x dims[l+1]

    void resize(const QNetwork& net, int batch_size);
};

// Writes Q(s, .) for every row of `inputs` (batch x input_dim) into `out`
// (batch x output_dim).
void batch_forward(const QNetwork& net, std::span<const double> inputs, int batch,
                   BatchWorkspace& ws, std::span<double> out);

// Mean squared error between Q(s_i, a_i) and target y_i over the batch;
// accumulates dLoss/dWeights into `grad` (which is overwritten). Targets are
// plain numbers, so nothing propagates through them.
double batch_loss_and_grad(const QNetwork& net, std::span<const double> inputs,
                           std::span<const int> actions, std::span<const double> targets,
                           int batch, BatchWorkspace& ws, std::span<double> grad);

struct Adam {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long t = 0;
    std::vector<double> m, v;

    void reset(size_t n);
    void step(std::span<double> weights, std::span<const double> grad, double lr);
};

}  // namespace fracdose::dqn
