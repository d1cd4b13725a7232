#include "swipt/chain.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "swipt/errors.hpp"

namespace swipt {

double total_cost(double batch_ce, double p_del, double lambda) {
    return batch_ce + lambda / std::max(p_del, kPdelEpsilon);
}

static void check_inputs(const NetworkParams& params, std::span<const Message> messages,
                         std::span<const Symbol> noise) {
    if (messages.empty()) throw ConfigError("empty minibatch");
    if (noise.size() != messages.size()) throw ConfigError("noise and message counts differ");
    if (params.encoder.out_dim() != 2 || params.decoder.in_dim() != 2) {
        throw ConfigError("encoder must emit and decoder must accept 2 real values");
    }
    if (params.encoder.in_dim() != params.decoder.out_dim()) {
        throw ConfigError("encoder input width and decoder output width differ");
    }
    if (params.decoder.layers.back().activation != Activation::Softmax) {
        throw ConfigError("decoder must end in a softmax layer");
    }
    const std::size_t m = params.encoder.in_dim();
    for (Message s : messages) {
        if (s >= m) throw ConfigError("message index out of range");
    }
}

CostBreakdown evaluate_cost(const NetworkParams& params, std::span<const Message> messages,
                            std::span<const Symbol> noise, const CostSpec& spec) {
    check_inputs(params, messages, noise);
    const auto normalized = normalize_power(encode(params.encoder, messages), spec.p_a);

    CostBreakdown out;
    out.degenerate = normalized.degenerate;
    MlpWorkspace ws(params.decoder);
    std::vector<double> probs(params.decoder.out_dim());
    double ce = 0.0;
    double power = 0.0;
    for (std::size_t k = 0; k < messages.size(); ++k) {
        decode(params.decoder, normalized.symbols[k] + noise[k], ws, probs);
        ce += cross_entropy(messages[k], probs);
        power += std::norm(normalized.symbols[k]);
    }
    const double b = static_cast<double>(messages.size());
    out.cross_entropy = ce / b;
    out.mean_power = power / b;
    out.p_del = delivered_power(normalized.symbols, spec.harvester);
    out.cost = total_cost(out.cross_entropy, out.p_del, spec.lambda);
    return out;
}

ForwardRecord forward_chain(const NetworkParams& params, std::span<const Message> messages,
                            std::span<const Symbol> noise, const CostSpec& spec) {
    check_inputs(params, messages, noise);
    const std::size_t batch = messages.size();
    const std::size_t m = params.encoder.in_dim();

    ForwardRecord rec;
    rec.spec = spec;
    rec.messages.assign(messages.begin(), messages.end());
    rec.encoder_acts.resize(batch);
    rec.raw.resize(batch);
    for (std::size_t k = 0; k < batch; ++k) {
        auto& acts = rec.encoder_acts[k];
        acts.push_back(one_hot(messages[k], m));
        for (const auto& layer : params.encoder.layers) acts.push_back(dense_forward(layer, acts.back()));
        rec.raw[k] = {acts.back()[0], acts.back()[1]};
    }
    rec.normalized = normalize_power(rec.raw, spec.p_a);

    rec.decoder_acts.resize(batch);
    double ce = 0.0;
    double power = 0.0;
    for (std::size_t k = 0; k < batch; ++k) {
        const Symbol y = rec.normalized.symbols[k] + noise[k];
        auto& acts = rec.decoder_acts[k];
        acts.push_back({y.real(), y.imag()});
        for (const auto& layer : params.decoder.layers) acts.push_back(dense_forward(layer, acts.back()));
        ce += cross_entropy(messages[k], acts.back());
        power += std::norm(rec.normalized.symbols[k]);
    }
    auto& r = rec.result;
    r.cross_entropy = ce / static_cast<double>(batch);
    r.mean_power = power / static_cast<double>(batch);
    r.p_del = delivered_power(rec.normalized.symbols, spec.harvester);
    r.cost = total_cost(r.cross_entropy, r.p_del, spec.lambda);
    r.degenerate = rec.normalized.degenerate;
    rec.valid = true;
    return rec;
}

void backward_chain(const NetworkParams& params, const ForwardRecord& rec, GradientTape& tape) {
    if (!rec.valid) throw ConfigError("backward_chain: no forward pass recorded");
    if (!same_shape(params, tape.grads)) throw ConfigError("backward_chain: tape shape mismatch");
    tape.zero();
    const std::size_t batch = rec.messages.size();
    const double inv_batch = 1.0 / static_cast<double>(batch);
    const std::size_t m = params.decoder.out_dim();

    // dCost/dx_k through the decoder (x and y differ by a constant).
    std::vector<Symbol> grad_x(batch);
    for (std::size_t k = 0; k < batch; ++k) {
        const auto& acts = rec.decoder_acts[k];
        const Message s = rec.messages[k];
        std::vector<double> upstream(m, 0.0);
        if (acts.back()[s] >= kLogEpsilon) upstream[s] = -inv_batch / acts.back()[s];
        for (std::size_t l = params.decoder.layers.size(); l-- > 0;) {
            const auto& layer = params.decoder.layers[l];
            std::vector<double> down(layer.in_dim);
            dense_backward(layer, acts[l], acts[l + 1], upstream, tape.grads.decoder.layers[l], down);
            upstream = std::move(down);
        }
        grad_x[k] = {upstream[0], upstream[1]};
    }

    const auto& r = rec.result;
    if (rec.spec.lambda != 0.0 && r.p_del >= kPdelEpsilon) {
        const double coef = -rec.spec.lambda / (r.p_del * r.p_del);
        std::vector<Symbol> pg(batch);
        delivered_power_gradient(rec.normalized.symbols, rec.spec.harvester, pg);
        for (std::size_t k = 0; k < batch; ++k) grad_x[k] += coef * pg[k];
    }

    // x = c u with c = sqrt(P_a B / S), S = sum |u|^2.
    const double c = rec.normalized.scale;
    double dot = 0.0;
    if (!rec.normalized.degenerate) {
        for (std::size_t k = 0; k < batch; ++k) {
            dot += grad_x[k].real() * rec.raw[k].real() + grad_x[k].imag() * rec.raw[k].imag();
        }
    }
    const double shrink = c * dot / rec.normalized.energy;

    for (std::size_t k = 0; k < batch; ++k) {
        const Symbol gu = c * grad_x[k] - shrink * rec.raw[k];
        std::vector<double> upstream{gu.real(), gu.imag()};
        const auto& acts = rec.encoder_acts[k];
        for (std::size_t l = params.encoder.layers.size(); l-- > 0;) {
            const auto& layer = params.encoder.layers[l];
            std::vector<double> down(layer.in_dim);
            dense_backward(layer, acts[l], acts[l + 1], upstream, tape.grads.encoder.layers[l], down);
            upstream = std::move(down);
        }
    }
}

CostBreakdown cost_and_gradient_serial(const NetworkParams& params,
                                       std::span<const Message> messages,
                                       std::span<const Symbol> noise, const CostSpec& spec,
                                       GradientTape& tape) {
    const auto rec = forward_chain(params, messages, noise, spec);
    backward_chain(params, rec, tape);
    return rec.result;
}

namespace {

// Flat offsets of each layer's weights and biases inside one buffer.
struct FlatLayout {
    std::vector<std::size_t> weight_offset;
    std::vector<std::size_t> bias_offset;
    std::vector<std::size_t> act_offset;  // layer input offsets in an activation buffer
    std::size_t param_size = 0;
    std::size_t act_size = 0;

    explicit FlatLayout(const Mlp& net) {
        act_offset.push_back(0);
        act_size = net.in_dim();
        for (const auto& l : net.layers) {
            weight_offset.push_back(param_size);
            param_size += l.weights.size();
            bias_offset.push_back(param_size);
            param_size += l.biases.size();
            act_offset.push_back(act_size);
            act_size += l.out_dim;
        }
    }
};

// Reverse through a stack. `delta` holds dCost/d(pre-activation) of the
// last layer on entry and is clobbered. Writes dCost/d(input) to in_grad
// unless it is null.
void backward_stack(const Mlp& net, const FlatLayout& lay, const double* acts, double* delta,
                    double* scratch, double* grad, double* in_grad) {
    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const auto& layer = net.layers[l];
        const double* in = acts + lay.act_offset[l];
        double* gw = grad + lay.weight_offset[l];
        double* gb = grad + lay.bias_offset[l];
        for (std::size_t r = 0; r < layer.out_dim; ++r) {
            const double d = delta[r];
            if (d == 0.0) continue;
            gb[r] += d;
            double* grow = gw + r * layer.in_dim;
            for (std::size_t c = 0; c < layer.in_dim; ++c) grow[c] += d * in[c];
        }
        if (l == 0 && in_grad == nullptr) break;
        double* down = l == 0 ? in_grad : scratch;
        std::fill(down, down + layer.in_dim, 0.0);
        const double* w = layer.weights.data();
        for (std::size_t r = 0; r < layer.out_dim; ++r) {
            const double d = delta[r];
            if (d == 0.0) continue;
            const double* row = w + r * layer.in_dim;
            for (std::size_t c = 0; c < layer.in_dim; ++c) down[c] += row[c] * d;
        }
        if (l == 0) break;
        // Hidden layers are ReLU or Linear.
        const bool relu = net.layers[l - 1].activation == Activation::ReLU;
        for (std::size_t c = 0; c < layer.in_dim; ++c) {
            delta[c] = (relu && in[c] <= 0.0) ? 0.0 : down[c];
        }
    }
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixMap = Eigen::Map<RowMatrix>;

// Owned copies: Eigen's vectorized kernels pick their summation order from
// the data alignment, and std::vector storage is not reliably aligned for
// wide packets. Owned matrices keep results identical across allocations.
RowMatrix weights_of(const DenseLayer& layer) {
    return Eigen::Map<const RowMatrix>(layer.weights.data(), static_cast<Eigen::Index>(layer.out_dim),
                                       static_cast<Eigen::Index>(layer.in_dim));
}

Eigen::VectorXd biases_of(const DenseLayer& layer) {
    return Eigen::Map<const Eigen::VectorXd>(layer.biases.data(), static_cast<Eigen::Index>(layer.out_dim));
}

void unflatten_add(const double* flat, const FlatLayout& lay, Mlp& dst) {
    for (std::size_t l = 0; l < dst.layers.size(); ++l) {
        auto& layer = dst.layers[l];
        const double* w = flat + lay.weight_offset[l];
        for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] += w[i];
        const double* b = flat + lay.bias_offset[l];
        for (std::size_t i = 0; i < layer.biases.size(); ++i) layer.biases[i] += b[i];
    }
}

}  // namespace

CostBreakdown cost_and_gradient(const NetworkParams& params, std::span<const Message> messages,
                                std::span<const Symbol> noise, const CostSpec& spec,
                                GradientTape& tape) {
    check_inputs(params, messages, noise);
    if (!same_shape(params, tape.grads)) throw ConfigError("cost_and_gradient: tape shape mismatch");
    tape.zero();

    const Mlp& enc = params.encoder;
    const Mlp& dec = params.decoder;
    const std::size_t m = enc.in_dim();
    const std::size_t batch = messages.size();
    const double inv_batch = 1.0 / static_cast<double>(batch);

    // Encoder on each distinct message; the first layer is a column select.
    const FlatLayout enc_lay(enc);
    std::vector<std::size_t> counts(m, 0);
    for (Message s : messages) ++counts[s];
    std::vector<double> enc_acts(m * enc_lay.act_size, 0.0);
    std::vector<Symbol> raw(m);
    for (std::size_t s = 0; s < m; ++s) {
        if (counts[s] == 0) continue;
        double* acts = enc_acts.data() + s * enc_lay.act_size;
        acts[s] = 1.0;
        const auto& first = enc.layers.front();
        double* h = acts + enc_lay.act_offset[1];
        for (std::size_t r = 0; r < first.out_dim; ++r) {
            const double v = first.weight(r, s) + first.biases[r];
            h[r] = (first.activation == Activation::ReLU && v < 0.0) ? 0.0 : v;
        }
        for (std::size_t l = 1; l < enc.layers.size(); ++l) {
            const auto& layer = enc.layers[l];
            const double* in = acts + enc_lay.act_offset[l];
            double* out = acts + enc_lay.act_offset[l + 1];
            for (std::size_t r = 0; r < layer.out_dim; ++r) {
                double acc = layer.biases[r];
                const double* row = layer.weights.data() + r * layer.in_dim;
                for (std::size_t c = 0; c < layer.in_dim; ++c) acc += row[c] * in[c];
                out[r] = (layer.activation == Activation::ReLU && acc < 0.0) ? 0.0 : acc;
            }
        }
        const double* u = acts + enc_lay.act_offset.back();
        raw[s] = {u[0], u[1]};
    }

    // Power normalization over the batch.
    CostBreakdown out;
    double energy = 0.0;
    for (std::size_t s = 0; s < m; ++s) energy += static_cast<double>(counts[s]) * std::norm(raw[s]);
    if (energy < kNormEpsilon) {
        energy = kNormEpsilon;
        out.degenerate = true;
    }
    const double scale = std::sqrt(spec.p_a * static_cast<double>(batch) / energy);
    std::vector<Symbol> x(m);
    std::vector<double> weights(m);
    double power = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
        x[s] = scale * raw[s];
        weights[s] = static_cast<double>(counts[s]) * inv_batch;
        power += weights[s] * std::norm(x[s]);
    }
    out.mean_power = power;

    std::vector<Symbol> power_grad(m);
    out.p_del = delivered_power_gradient(x, weights, spec.harvester, power_grad);

    // Decoder over samples, in fixed-size chunks.
    const FlatLayout dec_lay(dec);
    const std::size_t n_chunks = (batch + kChainChunk - 1) / kChainChunk;
    std::vector<double> chunk_grad(n_chunks * dec_lay.param_size, 0.0);
    std::vector<Symbol> chunk_gy(n_chunks * m, Symbol{});
    std::vector<double> chunk_ce(n_chunks, 0.0);

    std::vector<RowMatrix> dec_w;
    std::vector<Eigen::VectorXd> dec_b;
    for (const auto& layer : dec.layers) {
        dec_w.push_back(weights_of(layer));
        dec_b.push_back(biases_of(layer));
    }

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ch = 0; ch < static_cast<std::ptrdiff_t>(n_chunks); ++ch) {
        const std::size_t begin = static_cast<std::size_t>(ch) * kChainChunk;
        const auto n = static_cast<Eigen::Index>(std::min(batch, begin + kChainChunk) - begin);
        double* grad = chunk_grad.data() + static_cast<std::size_t>(ch) * dec_lay.param_size;
        Symbol* gy = chunk_gy.data() + static_cast<std::size_t>(ch) * m;

        // acts[l] holds the input of layer l, one column per sample.
        std::vector<Eigen::MatrixXd> acts(dec.layers.size() + 1);
        acts[0].resize(2, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const std::size_t k = begin + static_cast<std::size_t>(j);
            const Symbol y = x[messages[k]] + noise[k];
            acts[0](0, j) = y.real();
            acts[0](1, j) = y.imag();
        }
        for (std::size_t l = 0; l < dec.layers.size(); ++l) {
            const auto& layer = dec.layers[l];
            acts[l + 1].noalias() = dec_w[l] * acts[l];
            acts[l + 1].colwise() += dec_b[l];
            if (layer.activation == Activation::ReLU) acts[l + 1] = acts[l + 1].cwiseMax(0.0);
        }
        Eigen::MatrixXd& probs = acts.back();
        for (Eigen::Index j = 0; j < n; ++j) {
            auto col = probs.col(j);
            col = (col.array() - col.maxCoeff()).exp().matrix();
            col /= col.sum();
        }

        double ce = 0.0;
        Eigen::MatrixXd delta = probs * inv_batch;
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto s = static_cast<Eigen::Index>(messages[begin + static_cast<std::size_t>(j)]);
            ce -= std::log(std::max(probs(s, j), kLogEpsilon));
            if (probs(s, j) >= kLogEpsilon) {
                delta(s, j) -= inv_batch;
            } else {
                delta.col(j).setZero();  // clamped: no gradient
            }
        }

        Eigen::MatrixXd down;
        RowMatrix gw_local;
        Eigen::VectorXd gb_local;
        for (std::size_t l = dec.layers.size(); l-- > 0;) {
            const auto& layer = dec.layers[l];
            RowMatrixMap gw(grad + dec_lay.weight_offset[l], static_cast<Eigen::Index>(layer.out_dim),
                            static_cast<Eigen::Index>(layer.in_dim));
            Eigen::Map<Eigen::VectorXd> gb(grad + dec_lay.bias_offset[l],
                                           static_cast<Eigen::Index>(layer.out_dim));
            // Reduce into owned storage, then add elementwise into the flat buffer.
            gw_local.noalias() = delta * acts[l].transpose();
            gb_local.noalias() = delta.rowwise().sum();
            gw += gw_local;
            gb += gb_local;
            down.noalias() = dec_w[l].transpose() * delta;
            if (l > 0 && dec.layers[l - 1].activation == Activation::ReLU) {
                down = (acts[l].array() > 0.0).select(down, 0.0);
            }
            delta.swap(down);
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            gy[messages[begin + static_cast<std::size_t>(j)]] += Symbol{delta(0, j), delta(1, j)};
        }
        chunk_ce[static_cast<std::size_t>(ch)] = ce;
    }

    double ce = 0.0;
    std::vector<double> dec_grad(dec_lay.param_size, 0.0);
    std::vector<Symbol> grad_x(m);
    for (std::size_t ch = 0; ch < n_chunks; ++ch) {
        ce += chunk_ce[ch];
        const double* g = chunk_grad.data() + ch * dec_lay.param_size;
        for (std::size_t i = 0; i < dec_lay.param_size; ++i) dec_grad[i] += g[i];
        for (std::size_t s = 0; s < m; ++s) grad_x[s] += chunk_gy[ch * m + s];
    }
    unflatten_add(dec_grad.data(), dec_lay, tape.grads.decoder);

    out.cross_entropy = ce * inv_batch + 0.0;
    out.cost = total_cost(out.cross_entropy, out.p_del, spec.lambda);

    if (spec.lambda != 0.0 && out.p_del >= kPdelEpsilon) {
        const double coef = -spec.lambda / (out.p_del * out.p_del);
        for (std::size_t s = 0; s < m; ++s) grad_x[s] += coef * power_grad[s];
    }

    double dot = 0.0;
    if (!out.degenerate) {
        for (std::size_t s = 0; s < m; ++s) {
            dot += grad_x[s].real() * raw[s].real() + grad_x[s].imag() * raw[s].imag();
        }
    }
    const double shrink = scale * dot / energy;

    std::vector<double> enc_grad(enc_lay.param_size, 0.0);
    std::vector<double> delta(enc.max_width());
    std::vector<double> scratch(enc.max_width());
    for (std::size_t s = 0; s < m; ++s) {
        if (counts[s] == 0) continue;
        const Symbol gu = scale * grad_x[s] - static_cast<double>(counts[s]) * shrink * raw[s];
        delta[0] = gu.real();
        delta[1] = gu.imag();
        const double* acts = enc_acts.data() + s * enc_lay.act_size;
        backward_stack(enc, enc_lay, acts, delta.data(), scratch.data(), enc_grad.data(), nullptr);
    }
    unflatten_add(enc_grad.data(), enc_lay, tape.grads.encoder);
    return out;
}

}  // namespace swipt
