#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace swipt {

// Counter-based random numbers (Philox2x64-10).
//
// A stream is identified by (seed, stream id). Draw number `counter` of a
// stream is a pure function of (seed, stream, counter): the 128-bit Philox
// block counter is (counter, stream) and the key is the seed. Distinct
// (stream, counter) pairs are distinct blocks under the same key, and the
// cipher is a bijection, so two streams never overlap. Workers therefore
// only need to agree on which counters they own; there is no generator
// state to hand around or split.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // Two independent 64-bit words for block `counter`.
    std::array<std::uint64_t, 2> block(std::uint64_t counter) const;

    // Uniform on the open interval (0, 1), 53 bits.
    double uniform(std::uint64_t counter) const;

    // Uniform integer in [0, n).
    std::uint32_t below(std::uint64_t counter, std::uint32_t n) const;

    // Pair of independent standard normals (Box-Muller on one block).
    std::complex<double> normal_pair(std::uint64_t counter) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

// Stream ids used across the library. Each consumer of randomness owns one.
namespace streams {
inline constexpr std::uint64_t kInitEncoder = 1;
inline constexpr std::uint64_t kTrainMessages = 2;
inline constexpr std::uint64_t kTrainNoise = 3;
inline constexpr std::uint64_t kCostMessages = 4;
inline constexpr std::uint64_t kCostNoise = 5;
inline constexpr std::uint64_t kEvalMessages = 6;
inline constexpr std::uint64_t kEvalNoise = 7;
inline constexpr std::uint64_t kMonteCarlo = 8;
inline constexpr std::uint64_t kGradcheck = 9;
inline constexpr std::uint64_t kInitDecoder = 10;
}  // namespace streams

}  // namespace swipt
