#include "swipt/rng.hpp"

#include <cmath>
#include <numbers>

namespace swipt {

namespace {

constexpr std::uint64_t kPhiloxMultiplier = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kPhiloxWeyl = 0x9E3779B97F4A7C15ULL;
constexpr int kPhiloxRounds = 10;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 2> RngStream::block(std::uint64_t counter) const {
    std::uint64_t x0 = counter;
    std::uint64_t x1 = stream_;
    std::uint64_t key = seed_;
    for (int r = 0; r < kPhiloxRounds; ++r) {
        std::uint64_t hi, lo;
        mulhilo(kPhiloxMultiplier, x0, hi, lo);
        x0 = hi ^ key ^ x1;
        x1 = lo;
        key += kPhiloxWeyl;
    }
    return {x0, x1};
}

static inline double to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(std::uint64_t counter) const {
    return to_open_unit(block(counter)[0]);
}

std::uint32_t RngStream::below(std::uint64_t counter, std::uint32_t n) const {
    const unsigned __int128 p = static_cast<unsigned __int128>(block(counter)[0]) * n;
    return static_cast<std::uint32_t>(p >> 64);
}

std::complex<double> RngStream::normal_pair(std::uint64_t counter) const {
    const auto b = block(counter);
    const double radius = std::sqrt(-2.0 * std::log(to_open_unit(b[0])));
    const double angle = 2.0 * std::numbers::pi * to_open_unit(b[1]);
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace swipt
