#include "swipt/channel.hpp"

#include <cmath>
#include <string>

#include "swipt/errors.hpp"

namespace swipt {

double snr_to_variance(double p_a, double snr) {
    if (!(p_a > 0.0) || !(snr > 0.0)) {
        throw ConfigError("snr_to_variance: P_a and snr must be positive (got P_a=" +
                          std::to_string(p_a) + ", snr=" + std::to_string(snr) + ")");
    }
    return p_a / snr;
}

ChannelParams ChannelParams::from_snr(double p_a, double snr) {
    return {snr_to_variance(p_a, snr), snr};
}

ChannelParams ChannelParams::from_variance(double p_a, double noise_variance) {
    if (!(noise_variance >= 0.0)) throw ConfigError("noise variance must be non-negative");
    return {noise_variance, noise_variance > 0.0 ? p_a / noise_variance : INFINITY};
}

Symbol awgn_noise(const RngStream& stream, std::uint64_t counter, double noise_variance) {
    return stream.normal_pair(counter) * std::sqrt(0.5 * noise_variance);
}

std::vector<Symbol> apply_awgn(std::span<const Symbol> batch, const ChannelParams& params,
                               const RngStream& stream, std::uint64_t first_counter) {
    std::vector<Symbol> out(batch.begin(), batch.end());
    if (params.noise_variance == 0.0) return out;
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] += awgn_noise(stream, first_counter + k, params.noise_variance);
    }
    return out;
}

}  // namespace swipt
