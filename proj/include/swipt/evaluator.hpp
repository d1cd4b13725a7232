#pragma once

#include <cstdint>
#include <functional>

#include "swipt/channel.hpp"
#include "swipt/harvester.hpp"
#include "swipt/transceiver.hpp"

namespace swipt {

struct EvalReport {
    double ser = 0.0;
    double ser_stderr = 0.0;
    double p_del = 0.0;
    double rate_bits = 0.0;
    std::uint64_t num_samples = 0;
    std::uint64_t errors = 0;
};

// A detector maps a received sample to a message. Detectors may hold
// scratch space, so each Monte-Carlo shard builds its own from a factory.
using DetectorFn = std::function<Message(Symbol)>;
using DetectorFactory = std::function<DetectorFn()>;

DetectorFactory learned_detector(const Mlp& decoder);
DetectorFactory ml_detector(const Constellation& c);

// Nearest point (ML under AWGN with uniform priors), ties to the lowest index.
Message ml_detect(const Constellation& c, Symbol y);

// Monte-Carlo SER. Sample i draws its message uniformly and its noise from
// counter i of the (seed, kEvalMessages) and (seed, kEvalNoise) streams, so
// the estimate does not depend on how samples are split into shards.
// shards == 0 picks one shard per OpenMP thread.
EvalReport estimate_ser(const Constellation& c, const DetectorFactory& detector,
                        const ChannelParams& channel, std::uint64_t num_samples,
                        std::uint64_t seed, unsigned shards = 0);
// Single loop over all samples; reference for the sharded version.
EvalReport estimate_ser_serial(const Constellation& c, const DetectorFactory& detector,
                               const ChannelParams& channel, std::uint64_t num_samples,
                               std::uint64_t seed);

// Exact probability-weighted delivered power.
double evaluate_power(const Constellation& c, const HarvesterModel& model);

// SER with the learned decoder plus P_del and log2(M) rate.
EvalReport evaluate_model(const Constellation& c, const Mlp& decoder, const ChannelParams& channel,
                          const HarvesterModel& model, std::uint64_t num_samples,
                          std::uint64_t seed);

enum class BaselineKind { QAM, PSK };

// Square/rectangular/cross QAM or a PSK ring (phase offset pi/M), scaled to
// mean power p_a. M must be 4, 8, 16 or 32.
Constellation classical_baseline(BaselineKind kind, std::size_t messages, double p_a);

}  // namespace swipt
