#include <doctest.h>

#include <cmath>

#include "swipt/channel.hpp"
#include "swipt/errors.hpp"
#include "swipt/rng.hpp"

using namespace swipt;

TEST_CASE("snr_to_variance examples") {
    CHECK(snr_to_variance(0.001, 50) == doctest::Approx(2e-5).epsilon(1e-15));
    CHECK(snr_to_variance(0.002, 50) == doctest::Approx(4e-5).epsilon(1e-15));
    CHECK(snr_to_variance(0.001, 1e300) < 1e-300);
    CHECK_THROWS_AS(snr_to_variance(0.0, 50), ConfigError);
    CHECK_THROWS_AS(snr_to_variance(0.001, -1), ConfigError);
    const auto cp = ChannelParams::from_snr(0.001, 50);
    CHECK(cp.noise_variance == doctest::Approx(2e-5));
}

TEST_CASE("apply_awgn with zero variance is an exact copy") {
    const std::vector<Symbol> x{{0.1, -0.2}, {1e-300, 3.0}, {0, 0}};
    const auto y = apply_awgn(x, ChannelParams::from_variance(0.001, 0.0), RngStream(1, 3));
    CHECK(y == x);
}

TEST_CASE("awgn statistics over 1e6 draws") {
    const double var = 2e-5;
    const RngStream s(123, streams::kTrainNoise);
    const RngStream sig(5, 77);
    const int n = 1000000;
    long double p = 0, mr = 0, mi = 0, rr = 0, ii = 0, ri = 0;
    long double xs = 0, xx = 0, xn = 0;
    for (int k = 0; k < n; ++k) {
        const Symbol z = awgn_noise(s, k, var);
        const double x = sig.uniform(k) - 0.5;  // stand-in signal
        p += std::norm(z);
        mr += z.real();
        mi += z.imag();
        rr += z.real() * z.real();
        ii += z.imag() * z.imag();
        ri += z.real() * z.imag();
        xs += x;
        xx += x * x;
        xn += x * z.real();
    }
    const double mean_power = static_cast<double>(p / n);
    CHECK(std::abs(mean_power - var) < 0.01 * var);
    const double se = std::sqrt(var / 2 / n);
    CHECK(std::abs(static_cast<double>(mr / n)) < 3 * se);
    CHECK(std::abs(static_cast<double>(mi / n)) < 3 * se);
    CHECK(static_cast<double>(rr / n) == doctest::Approx(var / 2).epsilon(0.01));
    CHECK(static_cast<double>(ii / n) == doctest::Approx(var / 2).epsilon(0.01));
    const double rho = static_cast<double>(ri / std::sqrt(rr * ii));
    CHECK(std::abs(rho) < 0.01);
    const long double vx = xx / n - (xs / n) * (xs / n);
    const double rho_xn = static_cast<double>((xn / n) / std::sqrt(vx * rr / n));
    CHECK(std::abs(rho_xn) < 0.01);
}

TEST_CASE("noise is reproducible from (seed, stream)") {
    const std::vector<Symbol> x(100, Symbol{0.01, 0.02});
    const auto cp = ChannelParams::from_snr(0.001, 50);
    const auto a = apply_awgn(x, cp, RngStream(9, 3), 40);
    const auto b = apply_awgn(x, cp, RngStream(9, 3), 40);
    const auto c = apply_awgn(x, cp, RngStream(9, 4), 40);
    CHECK(a == b);
    CHECK(a != c);
    // Counter offsets address the same underlying sequence.
    const auto d = apply_awgn(x, cp, RngStream(9, 3), 41);
    for (std::size_t k = 0; k + 1 < x.size(); ++k) CHECK(d[k] == a[k + 1]);
}
