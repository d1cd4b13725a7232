#include "swipt/nn.hpp"

#include <algorithm>
#include <cmath>

#include "swipt/errors.hpp"
#include "swipt/rng.hpp"

namespace swipt {

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Activation act)
    : in_dim(in), out_dim(out), weights(in * out, 0.0), biases(out, 0.0), activation(act) {
    if (in == 0 || out == 0) {
        throw ConfigError("dense layer with zero size (" + std::to_string(out) + "x" +
                          std::to_string(in) + ")");
    }
}

std::vector<std::size_t> Mlp::dims() const {
    std::vector<std::size_t> d;
    if (layers.empty()) return d;
    d.push_back(layers.front().in_dim);
    for (const auto& l : layers) d.push_back(l.out_dim);
    return d;
}

std::size_t Mlp::max_width() const {
    std::size_t w = 0;
    for (const auto& l : layers) w = std::max({w, l.in_dim, l.out_dim});
    return w;
}

Architecture Architecture::standard(std::size_t messages) {
    Architecture a;
    a.messages = messages;
    a.encoder_hidden = {2 * messages};
    a.decoder_hidden = {2 * messages};
    return a;
}

std::vector<std::size_t> Architecture::encoder_dims() const {
    std::vector<std::size_t> d{messages};
    d.insert(d.end(), encoder_hidden.begin(), encoder_hidden.end());
    d.push_back(2);
    return d;
}

std::vector<std::size_t> Architecture::decoder_dims() const {
    std::vector<std::size_t> d{2};
    d.insert(d.end(), decoder_hidden.begin(), decoder_hidden.end());
    d.push_back(messages);
    return d;
}

static NetworkParams zeroed(const NetworkParams& p) {
    NetworkParams z = p;
    for (auto& b : param_blocks(z)) std::fill(b.values.begin(), b.values.end(), 0.0);
    return z;
}

GradientTape GradientTape::zeros_like(const NetworkParams& params) {
    return GradientTape{zeroed(params)};
}

void GradientTape::zero() {
    for (auto& b : param_blocks(grads)) std::fill(b.values.begin(), b.values.end(), 0.0);
}

AdamState::AdamState(const NetworkParams& params, AdamHyper h)
    : hyper(h), first_moment(zeroed(params)), second_moment(zeroed(params)) {}

namespace {

template <typename Block, typename Params>
std::vector<Block> collect_blocks(Params& params) {
    std::vector<Block> blocks;
    auto add = [&blocks](const char* net, auto& mlp) {
        for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
            auto& layer = mlp.layers[i];
            const std::string prefix = std::string(net) + "[" + std::to_string(i) + "]";
            blocks.push_back({prefix + ".weights", layer.weights});
            blocks.push_back({prefix + ".biases", layer.biases});
        }
    };
    add("encoder", params.encoder);
    add("decoder", params.decoder);
    return blocks;
}

}  // namespace

std::vector<ParamBlock> param_blocks(NetworkParams& params) {
    return collect_blocks<ParamBlock>(params);
}

std::vector<ConstParamBlock> param_blocks(const NetworkParams& params) {
    return collect_blocks<ConstParamBlock>(params);
}

std::size_t param_count(const NetworkParams& params) {
    std::size_t n = 0;
    for (const auto& b : param_blocks(params)) n += b.values.size();
    return n;
}

bool same_shape(const NetworkParams& a, const NetworkParams& b) {
    return a.encoder.dims() == b.encoder.dims() && a.decoder.dims() == b.decoder.dims();
}

static inline double apply_scalar(Activation act, double v) {
    return (act == Activation::ReLU && v < 0.0) ? 0.0 : v;
}

void dense_forward(const DenseLayer& layer, std::span<const double> in, std::span<double> out) {
    if (in.size() != layer.in_dim || out.size() != layer.out_dim) {
        throw ConfigError("dense_forward: layer is " + std::to_string(layer.out_dim) + "x" +
                          std::to_string(layer.in_dim) + ", got input " +
                          std::to_string(in.size()) + " and output " + std::to_string(out.size()));
    }
    const double* w = layer.weights.data();
    for (std::size_t r = 0; r < layer.out_dim; ++r) {
        double acc = layer.biases[r];
        const double* row = w + r * layer.in_dim;
        for (std::size_t c = 0; c < layer.in_dim; ++c) acc += row[c] * in[c];
        out[r] = apply_scalar(layer.activation, acc);
    }
    if (layer.activation == Activation::Softmax) softmax(out, out);
}

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> in) {
    std::vector<double> out(layer.out_dim);
    dense_forward(layer, in, out);
    return out;
}

void softmax(std::span<const double> logits, std::span<double> probs) {
    double peak = -INFINITY;
    for (double v : logits) {
        if (!std::isfinite(v)) throw ConfigError("softmax: non-finite logit");
        peak = std::max(peak, v);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - peak);
        total += probs[i];
    }
    const double inv = 1.0 / total;
    for (auto& p : probs) p *= inv;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> p(logits.size());
    softmax(logits, p);
    return p;
}

void dense_backward(const DenseLayer& layer, std::span<const double> input,
                    std::span<const double> output, std::span<const double> upstream,
                    DenseLayer& grad, std::span<double> input_grad) {
    const std::size_t n_out = layer.out_dim;
    const std::size_t n_in = layer.in_dim;
    if (input.size() != n_in || output.size() != n_out || upstream.size() != n_out ||
        grad.in_dim != n_in || grad.out_dim != n_out) {
        throw ConfigError("dense_backward: shape mismatch");
    }

    // dCost/d(pre-activation)
    std::vector<double> delta(n_out);
    switch (layer.activation) {
        case Activation::Linear:
            std::copy(upstream.begin(), upstream.end(), delta.begin());
            break;
        case Activation::ReLU:
            for (std::size_t r = 0; r < n_out; ++r) delta[r] = output[r] > 0.0 ? upstream[r] : 0.0;
            break;
        case Activation::Softmax: {
            double dot = 0.0;
            for (std::size_t r = 0; r < n_out; ++r) dot += output[r] * upstream[r];
            for (std::size_t r = 0; r < n_out; ++r) delta[r] = output[r] * (upstream[r] - dot);
            break;
        }
    }

    for (std::size_t r = 0; r < n_out; ++r) {
        grad.biases[r] += delta[r];
        double* grow = grad.weights.data() + r * n_in;
        for (std::size_t c = 0; c < n_in; ++c) grow[c] += delta[r] * input[c];
    }
    if (!input_grad.empty()) {
        std::fill(input_grad.begin(), input_grad.end(), 0.0);
        for (std::size_t r = 0; r < n_out; ++r) {
            const double* row = layer.weights.data() + r * n_in;
            for (std::size_t c = 0; c < n_in; ++c) input_grad[c] += row[c] * delta[r];
        }
    }
}

Mlp init_mlp(std::span<const std::size_t> dims, Activation output_activation, std::uint64_t seed,
             std::uint64_t stream) {
    if (dims.size() < 2) throw ConfigError("network needs at least input and output widths");
    const RngStream rng(seed, stream);
    std::uint64_t counter = 0;
    Mlp mlp;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        const bool last = i + 2 == dims.size();
        DenseLayer layer(dims[i], dims[i + 1], last ? output_activation : Activation::ReLU);
        const double bound = std::sqrt(6.0 / static_cast<double>(dims[i] + dims[i + 1]));
        for (auto& w : layer.weights) w = (2.0 * rng.uniform(counter++) - 1.0) * bound;
        mlp.layers.push_back(std::move(layer));
    }
    return mlp;
}

NetworkParams init_params(const Architecture& arch, std::uint64_t seed) {
    const auto enc = arch.encoder_dims();
    const auto dec = arch.decoder_dims();
    return NetworkParams{init_mlp(enc, Activation::Linear, seed, streams::kInitEncoder),
                         init_mlp(dec, Activation::Softmax, seed, streams::kInitDecoder)};
}

void adam_step(NetworkParams& params, const GradientTape& tape, AdamState& state) {
    if (!same_shape(params, tape.grads) || !same_shape(params, state.first_moment)) {
        throw ConfigError("adam_step: parameter, gradient and moment shapes differ");
    }
    const auto& h = state.hyper;
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(h.beta1, t);
    const double correction2 = 1.0 - std::pow(h.beta2, t);

    auto p = param_blocks(params);
    auto g = param_blocks(tape.grads);
    auto m = param_blocks(state.first_moment);
    auto v = param_blocks(state.second_moment);
    for (std::size_t b = 0; b < p.size(); ++b) {
        for (std::size_t i = 0; i < p[b].values.size(); ++i) {
            const double gi = g[b].values[i];
            double& mi = m[b].values[i];
            double& vi = v[b].values[i];
            mi = h.beta1 * mi + (1.0 - h.beta1) * gi;
            vi = h.beta2 * vi + (1.0 - h.beta2) * gi * gi;
            const double m_hat = mi / correction1;
            const double v_hat = vi / correction2;
            p[b].values[i] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
        }
    }
}

}  // namespace swipt
