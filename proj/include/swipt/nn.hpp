#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace swipt {

enum class Activation { ReLU, Linear, Softmax };

// Fully connected layer, weights stored out x in, row-major.
struct DenseLayer {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    std::vector<double> weights;
    std::vector<double> biases;
    Activation activation = Activation::Linear;

    DenseLayer() = default;
    DenseLayer(std::size_t in, std::size_t out, Activation act);

    double weight(std::size_t row, std::size_t col) const { return weights[row * in_dim + col]; }
    double& weight(std::size_t row, std::size_t col) { return weights[row * in_dim + col]; }
};

struct Mlp {
    std::vector<DenseLayer> layers;

    std::size_t in_dim() const { return layers.front().in_dim; }
    std::size_t out_dim() const { return layers.back().out_dim; }
    // Layer widths including input, e.g. {16, 32, 2}.
    std::vector<std::size_t> dims() const;
    // Widest layer output; sizes scratch buffers.
    std::size_t max_width() const;
};

// Encoder: M -> hidden... -> 2 (re, im). Decoder: 2 -> hidden... -> M.
struct NetworkParams {
    Mlp encoder;
    Mlp decoder;
};

struct Architecture {
    std::size_t messages = 16;
    std::vector<std::size_t> encoder_hidden{32};
    std::vector<std::size_t> decoder_hidden{32};

    // Default shape: one ReLU layer of width 2M on each side.
    static Architecture standard(std::size_t messages);

    std::vector<std::size_t> encoder_dims() const;
    std::vector<std::size_t> decoder_dims() const;
};

// Parameter gradients, shaped like NetworkParams.
struct GradientTape {
    NetworkParams grads;

    static GradientTape zeros_like(const NetworkParams& params);
    void zero();
};

struct AdamHyper {
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamHyper hyper;
    NetworkParams first_moment;
    NetworkParams second_moment;
    std::uint64_t step_count = 0;

    AdamState() = default;
    AdamState(const NetworkParams& params, AdamHyper h);
};

// Named view of one weight matrix or bias vector. Order: encoder layers
// (weights, biases), then decoder layers.
struct ParamBlock {
    std::string name;
    std::span<double> values;
};
struct ConstParamBlock {
    std::string name;
    std::span<const double> values;
};

std::vector<ParamBlock> param_blocks(NetworkParams& params);
std::vector<ConstParamBlock> param_blocks(const NetworkParams& params);
std::size_t param_count(const NetworkParams& params);
bool same_shape(const NetworkParams& a, const NetworkParams& b);

// out = activation(W * in + b). Throws ConfigError on size mismatch.
void dense_forward(const DenseLayer& layer, std::span<const double> in, std::span<double> out);
std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> in);

// Max-subtracted softmax. Throws ConfigError on non-finite input.
void softmax(std::span<const double> logits, std::span<double> probs);
std::vector<double> softmax(std::span<const double> logits);

// Reverse pass through one layer. `upstream` is dCost/d(output) where
// output is the post-activation value recorded by dense_forward.
// Accumulates into grad (same shape as layer); writes dCost/d(input) when
// input_grad is non-empty.
void dense_backward(const DenseLayer& layer, std::span<const double> input,
                    std::span<const double> output, std::span<const double> upstream,
                    DenseLayer& grad, std::span<double> input_grad);

// Xavier-uniform weights, zero biases. Pure function of (dims, seed).
Mlp init_mlp(std::span<const std::size_t> dims, Activation output_activation,
             std::uint64_t seed, std::uint64_t stream);
NetworkParams init_params(const Architecture& arch, std::uint64_t seed);

// One Adam update with bias correction.
void adam_step(NetworkParams& params, const GradientTape& tape, AdamState& state);

}  // namespace swipt
