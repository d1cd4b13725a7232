#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "swipt/harvester.hpp"
#include "swipt/nn.hpp"
#include "swipt/transceiver.hpp"

namespace swipt {

// Fixed training graph:
//   message -> encoder -> power normalization -> + noise -> decoder -> softmax
// with cost = mean cross-entropy + lambda / max(P_del, 1e-12), where P_del is
// taken from the normalized (noise-free) batch. Noise realizations are
// constants of the graph.

inline constexpr double kPdelEpsilon = 1e-12;

struct CostSpec {
    double p_a = 0.001;
    double lambda = 0.0;
    HarvesterModel harvester = ModelAParams{};
};

struct CostBreakdown {
    double cost = 0.0;
    double cross_entropy = 0.0;  // minibatch mean, nats
    double p_del = 0.0;
    double mean_power = 0.0;     // mean |x|^2 after normalization
    bool degenerate = false;     // normalization energy was clamped
};

double total_cost(double batch_ce, double p_del, double lambda);

// Forward-only evaluation assembled from the transceiver, channel and
// harvester operations. Used for final-cost reporting and as the
// finite-difference oracle.
CostBreakdown evaluate_cost(const NetworkParams& params, std::span<const Message> messages,
                            std::span<const Symbol> noise, const CostSpec& spec);

// Activations of one minibatch, kept for the reference reverse pass.
struct ForwardRecord {
    bool valid = false;
    CostSpec spec;
    std::vector<Message> messages;
    // Per encoder layer: one-hot input rows, then each layer's output, for every sample.
    std::vector<std::vector<std::vector<double>>> encoder_acts;
    std::vector<Symbol> raw;        // encoder output u_k
    NormalizedBatch normalized;     // x_k
    // Per sample: decoder input (y_k) followed by each layer's output.
    std::vector<std::vector<std::vector<double>>> decoder_acts;
    CostBreakdown result;
};

ForwardRecord forward_chain(const NetworkParams& params, std::span<const Message> messages,
                            std::span<const Symbol> noise, const CostSpec& spec);

// Reference reverse pass: zeroes the tape, then fills it with dCost/dtheta
// averaged over the minibatch. Throws ConfigError if the record is empty.
void backward_chain(const NetworkParams& params, const ForwardRecord& record, GradientTape& tape);

// Serial reference: forward_chain followed by backward_chain.
CostBreakdown cost_and_gradient_serial(const NetworkParams& params,
                                       std::span<const Message> messages,
                                       std::span<const Symbol> noise, const CostSpec& spec,
                                       GradientTape& tape);

// Samples per reduction chunk of the parallel kernel. Partial sums are
// combined in chunk order, so results do not depend on the thread count.
inline constexpr std::size_t kChainChunk = 128;

// Fused, OpenMP-parallel forward + reverse pass. Exploits that the encoder
// only sees M distinct inputs. Matches the serial reference up to rounding.
CostBreakdown cost_and_gradient(const NetworkParams& params, std::span<const Message> messages,
                                std::span<const Symbol> noise, const CostSpec& spec,
                                GradientTape& tape);

}  // namespace swipt
