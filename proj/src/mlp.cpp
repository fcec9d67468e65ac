#include "fracdose/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace fracdose::dqn {

QNetwork::QNetwork(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw std::invalid_argument("network needs at least two layers");
    for (int d : dims_) {
        if (d < 1) throw std::invalid_argument("layer widths must be >= 1");
    }
    size_t offset = 0;
    for (int l = 0; l + 1 < static_cast<int>(dims_.size()); ++l) {
        w_offset_.push_back(offset);
        offset += static_cast<size_t>(dims_[l]) * dims_[l + 1];
        b_offset_.push_back(offset);
        offset += dims_[l + 1];
    }
    weights_.assign(offset, 0.0);
}

void QNetwork::init_weights(Rng& rng) {
    for (int l = 0; l < layer_count(); ++l) {
        const int fan_in = dims_[l];
        const double bound = std::sqrt(6.0 / fan_in);
        double* w = weights_.data() + w_offset_[l];
        const size_t count = static_cast<size_t>(dims_[l]) * dims_[l + 1];
        for (size_t k = 0; k < count; ++k) w[k] = rng.uniform(-bound, bound);
        double* b = weights_.data() + b_offset_[l];
        for (int k = 0; k < dims_[l + 1]; ++k) b[k] = 0.0;
    }
}

std::vector<double> QNetwork::forward(std::span<const double> input) const {
    if (static_cast<int>(input.size()) != input_dim()) {
        throw std::invalid_argument("observation length does not match network input");
    }
    std::vector<double> cur(input.begin(), input.end());
    std::vector<double> next;
    for (int l = 0; l < layer_count(); ++l) {
        const int in = dims_[l], out = dims_[l + 1];
        const double* w = weights_.data() + w_offset_[l];
        const double* b = weights_.data() + b_offset_[l];
        next.assign(out, 0.0);
        for (int o = 0; o < out; ++o) {
            double s = b[o];
            const double* row = w + static_cast<size_t>(o) * in;
            for (int i = 0; i < in; ++i) s += row[i] * cur[i];
            next[o] = (l + 1 < layer_count() && s < 0.0) ? 0.0 : s;
        }
        cur.swap(next);
    }
    return cur;
}

void BatchWorkspace::resize(const QNetwork& net, int batch_size) {
    batch = batch_size;
    act.resize(net.dims_.size());
    delta.resize(net.layer_count());
    for (size_t l = 0; l < net.dims_.size(); ++l) {
        act[l].assign(static_cast<size_t>(batch_size) * net.dims_[l], 0.0);
    }
    for (int l = 0; l < net.layer_count(); ++l) {
        delta[l].assign(static_cast<size_t>(batch_size) * net.dims_[l + 1], 0.0);
    }
}

namespace {

void forward_into_workspace(const QNetwork& net, std::span<const double> inputs, int batch,
                            BatchWorkspace& ws) {
    if (ws.batch != batch) ws.resize(net, batch);
    const auto& dims = net.dims();
    std::copy(inputs.begin(), inputs.end(), ws.act[0].begin());
    for (int l = 0; l < net.layer_count(); ++l) {
        const int in = dims[l], out = dims[l + 1];
        const bool relu = l + 1 < net.layer_count();
        const double* w = net.weights().data() + net.weight_offset(l);
        const double* b = net.weights().data() + net.bias_offset(l);
        const double* a_prev = ws.act[l].data();
        double* a = ws.act[l + 1].data();
        for (int n = 0; n < batch; ++n) {
            const double* x = a_prev + static_cast<size_t>(n) * in;
            double* y = a + static_cast<size_t>(n) * out;
            for (int o = 0; o < out; ++o) {
                double s = b[o];
                const double* row = w + static_cast<size_t>(o) * in;
                for (int i = 0; i < in; ++i) s += row[i] * x[i];
                y[o] = (relu && s < 0.0) ? 0.0 : s;
            }
        }
    }
}

}  // namespace

void batch_forward(const QNetwork& net, std::span<const double> inputs, int batch,
                   BatchWorkspace& ws, std::span<double> out) {
    forward_into_workspace(net, inputs, batch, ws);
    const auto& top = ws.act.back();
    std::copy(top.begin(), top.end(), out.begin());
}

double batch_loss_and_grad(const QNetwork& net, std::span<const double> inputs,
                           std::span<const int> actions, std::span<const double> targets,
                           int batch, BatchWorkspace& ws, std::span<double> grad) {
    if (batch < 1) throw std::invalid_argument("batch must be nonempty");
    forward_into_workspace(net, inputs, batch, ws);
    const auto& dims = net.dims();
    const int top = net.layer_count();
    const int out_dim = dims[top];

    std::fill(grad.begin(), grad.end(), 0.0);

    // dLoss/dQ on the taken actions only
    double loss = 0.0;
    auto& dtop = ws.delta[top - 1];
    std::fill(dtop.begin(), dtop.end(), 0.0);
    for (int n = 0; n < batch; ++n) {
        const double q = ws.act[top][static_cast<size_t>(n) * out_dim + actions[n]];
        const double diff = q - targets[n];
        loss += diff * diff;
        dtop[static_cast<size_t>(n) * out_dim + actions[n]] = 2.0 * diff / batch;
    }
    loss /= batch;

    for (int l = top - 1; l >= 0; --l) {
        const int in = dims[l], out = dims[l + 1];
        const double* w = net.weights().data() + net.weight_offset(l);
        double* gw = grad.data() + net.weight_offset(l);
        double* gb = grad.data() + net.bias_offset(l);
        const double* a_prev = ws.act[l].data();
        const double* d = ws.delta[l].data();
        for (int n = 0; n < batch; ++n) {
            const double* x = a_prev + static_cast<size_t>(n) * in;
            const double* dn = d + static_cast<size_t>(n) * out;
            for (int o = 0; o < out; ++o) {
                const double dv = dn[o];
                if (dv == 0.0) continue;
                gb[o] += dv;
                double* grow = gw + static_cast<size_t>(o) * in;
                for (int i = 0; i < in; ++i) grow[i] += dv * x[i];
            }
        }
        if (l == 0) break;
        // propagate: delta_prev = W^T delta, masked by the ReLU of layer l
        auto& dprev = ws.delta[l - 1];
        std::fill(dprev.begin(), dprev.end(), 0.0);
        for (int n = 0; n < batch; ++n) {
            const double* dn = d + static_cast<size_t>(n) * out;
            const double* a = a_prev + static_cast<size_t>(n) * in;
            double* dp = dprev.data() + static_cast<size_t>(n) * in;
            for (int o = 0; o < out; ++o) {
                const double dv = dn[o];
                if (dv == 0.0) continue;
                const double* row = w + static_cast<size_t>(o) * in;
                for (int i = 0; i < in; ++i) dp[i] += dv * row[i];
            }
            for (int i = 0; i < in; ++i) {
                if (a[i] <= 0.0) dp[i] = 0.0;
            }
        }
    }
    return loss;
}

void Adam::reset(size_t n) {
    t = 0;
    m.assign(n, 0.0);
    v.assign(n, 0.0);
}

void Adam::step(std::span<double> weights, std::span<const double> grad, double lr) {
    if (m.size() != weights.size()) reset(weights.size());
    ++t;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (size_t k = 0; k < weights.size(); ++k) {
        m[k] = beta1 * m[k] + (1.0 - beta1) * grad[k];
        v[k] = beta2 * v[k] + (1.0 - beta2) * grad[k] * grad[k];
        const double mhat = m[k] / bc1;
        const double vhat = v[k] / bc2;
        weights[k] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace fracdose::dqn
