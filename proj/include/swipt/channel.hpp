#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swipt/rng.hpp"
#include "swipt/transceiver.hpp"

namespace swipt {

// Complex AWGN. noise_variance is the total variance E|n|^2; each of the
// real and imaginary parts carries half of it. snr is the linear ratio
// P_a / noise_variance.
struct ChannelParams {
    double noise_variance = 0.0;
    double snr = 0.0;

    static ChannelParams from_snr(double p_a, double snr);
    static ChannelParams from_variance(double p_a, double noise_variance);
};

// sigma^2 = P_a / snr. Throws ConfigError unless both are positive.
double snr_to_variance(double p_a, double snr);

// Noise sample number `counter` of the stream.
Symbol awgn_noise(const RngStream& stream, std::uint64_t counter, double noise_variance);

// y_k = x_k + n_k with n_k drawn at counters first_counter + k.
std::vector<Symbol> apply_awgn(std::span<const Symbol> batch, const ChannelParams& params,
                               const RngStream& stream, std::uint64_t first_counter = 0);

}  // namespace swipt
