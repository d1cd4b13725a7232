#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swipt/errors.hpp"
#include "swipt/rng.hpp"
#include "swipt/transceiver.hpp"

using namespace swipt;

namespace {

std::vector<Symbol> random_batch(std::uint64_t seed, std::size_t n, double spread) {
    const RngStream s(seed, 50);
    std::vector<Symbol> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = spread * s.normal_pair(k);
    return out;
}

double batch_power(const std::vector<Symbol>& v) {
    double p = 0.0;
    for (const auto& x : v) p += std::norm(x);
    return p / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("one_hot examples and range check") {
    CHECK(one_hot(0, 4) == std::vector<double>{1, 0, 0, 0});
    CHECK(one_hot(3, 4).back() == 1.0);
    for (Message s = 0; s < 32; ++s) CHECK(detect(one_hot(s, 32)) == s);
    CHECK_THROWS_AS(one_hot(4, 4), ConfigError);
}

TEST_CASE("encode is deterministic per message") {
    const auto p = init_params(Architecture::standard(8), 11);
    const std::vector<Message> msgs{3, 1, 3, 7, 1, 0, 3};
    const auto x = encode(p.encoder, msgs);
    CHECK(x[0] == x[2]);
    CHECK(x[0] == x[6]);
    CHECK(x[1] == x[4]);

    std::vector<Message> all;
    for (int rep = 0; rep < 3; ++rep) {
        for (Message s = 0; s < 8; ++s) all.push_back(s);
    }
    const auto y = encode(p.encoder, all);
    std::vector<Symbol> distinct;
    for (const auto& v : y) {
        if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) distinct.push_back(v);
    }
    CHECK(distinct.size() <= 8);

    auto zero = p;
    for (double& w : zero.encoder.layers.back().weights) w = 0.0;
    for (double& b : zero.encoder.layers.back().biases) b = 0.0;
    for (const auto& v : encode(zero.encoder, all)) CHECK(v == Symbol{0.0, 0.0});
}

TEST_CASE("encode uses a column select equal to the full one-hot product") {
    const auto p = init_params(Architecture::standard(6), 2);
    MlpWorkspace ws(p.encoder);
    for (Message s = 0; s < 6; ++s) {
        auto h = one_hot(s, 6);
        for (const auto& layer : p.encoder.layers) h = dense_forward(layer, h);
        const Symbol x = encode_message(p.encoder, s, ws);
        CHECK(std::abs(x.real() - h[0]) < 1e-15);
        CHECK(std::abs(x.imag() - h[1]) < 1e-15);
    }
}

TEST_CASE("normalize_power examples") {
    const std::vector<Symbol> one{{3, 4}};
    const auto a = normalize_power(one, 1.0);
    CHECK(std::abs(a.symbols[0] - Symbol{0.6, 0.8}) < 1e-15);

    const std::vector<Symbol> two{{1, 0}, {0, 0}};
    const auto b = normalize_power(two, 1.0);
    CHECK(std::abs(b.symbols[0] - Symbol{std::sqrt(2.0), 0}) < 1e-15);
    CHECK(b.symbols[1] == Symbol{0, 0});
    CHECK(std::abs(batch_power(b.symbols) - 1.0) < 1e-15);

    auto c = random_batch(4, 50, 1.0);
    const auto pre = normalize_power(c, 0.001);
    const auto again = normalize_power(pre.symbols, 0.001);
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(std::abs(again.symbols[k] - pre.symbols[k]) <= 1e-15 * std::abs(pre.symbols[k]) + 1e-300);
    }
}

TEST_CASE("normalize_power flags a degenerate batch") {
    const std::vector<Symbol> zeros(5, Symbol{});
    const auto r = normalize_power(zeros, 0.001);
    CHECK(r.degenerate);
    for (const auto& x : r.symbols) CHECK(std::isfinite(x.real()));
    CHECK_THROWS_AS(normalize_power(std::vector<Symbol>{}, 1.0), ConfigError);
}

TEST_CASE("normalize_power property: mean power is P_a for random batches") {
    const RngStream s(77, 1);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + s.below(3 * trial, 200);
        const double spread = std::pow(10.0, 6.0 * s.uniform(3 * trial + 1) - 3.0);
        const double p_a = std::pow(10.0, 4.0 * s.uniform(3 * trial + 2) - 4.0);
        const auto b = random_batch(trial, n, spread);
        const auto r = normalize_power(b, p_a);
        REQUIRE_FALSE(r.degenerate);
        REQUIRE(std::abs(batch_power(r.symbols) - p_a) < 1e-9 * std::max(1.0, p_a));
    }
}

TEST_CASE("decode and detect") {
    auto p = init_params(Architecture::standard(8), 5);
    const auto probs = decode(p.decoder, Symbol{0.01, -0.02});
    double sum = 0.0;
    for (double v : probs) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);
    CHECK(decode(p.decoder, Symbol{0.01, -0.02}) == probs);

    auto zero = p;
    for (auto& layer : zero.decoder.layers) {
        std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
        std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
    }
    for (double v : decode(zero.decoder, Symbol{0.3, 0.1})) CHECK(v == doctest::Approx(1.0 / 8).epsilon(1e-15));

    CHECK(detect(std::vector<double>{0.1, 0.7, 0.2}) == 1);
    CHECK(detect(std::vector<double>{0.5, 0.5}) == 0);
    CHECK(detect(std::vector<double>(32, 1.0 / 32)) == 0);
}

TEST_CASE("cross_entropy examples and properties") {
    CHECK(cross_entropy(2, std::vector<double>{0, 0, 1, 0}) == 0.0);
    const std::vector<double> uniform(32, 1.0 / 32);
    CHECK(cross_entropy(5, uniform) == doctest::Approx(std::log(32.0)).epsilon(1e-14));
    const std::vector<double> q{0.25, 0.75};
    CHECK(std::abs(cross_entropy(0, q) - static_cast<double>(std::log(4.0L))) < 1e-15);
    CHECK(cross_entropy(one_hot(0, 2), q) == cross_entropy(0, q));
    // clamped at 1e-15
    CHECK(cross_entropy(0, std::vector<double>{0.0, 1.0}) == doctest::Approx(-std::log(1e-15)));

    const RngStream s(8, 8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> logits(6);
        for (int i = 0; i < 6; ++i) logits[i] = 10 * s.uniform(trial * 6 + i);
        const auto p = softmax(logits);
        const double ce = cross_entropy(static_cast<Message>(trial % 6), p);
        CHECK(ce >= 0.0);
        CHECK(ce > 0.0);
    }
}

TEST_CASE("export_constellation: power, size, scale covariance") {
    for (std::size_t m : {4, 8, 32}) {
        auto p = init_params(Architecture::standard(m), 21);
        const auto e = export_constellation(p.encoder, 0.001);
        CHECK(e.constellation.size() == m);
        CHECK_FALSE(e.degenerate);
        CHECK(std::abs(e.constellation.mean_power() - 0.001) < 1e-9);

        // Scaling the final layer (weights and bias) by c > 0 scales every
        // raw symbol by c, which the normalization cancels.
        auto scaled = p;
        for (double& w : scaled.encoder.layers.back().weights) w *= 3.7;
        for (double& b : scaled.encoder.layers.back().biases) b *= 3.7;
        const auto f = export_constellation(scaled.encoder, 0.001);
        for (std::size_t s = 0; s < m; ++s) {
            CHECK(std::abs(f.constellation.points[s] - e.constellation.points[s]) < 1e-12);
        }
    }
    auto zero = init_params(Architecture::standard(4), 1);
    for (double& w : zero.encoder.layers.back().weights) w = 0.0;
    CHECK(export_constellation(zero.encoder, 0.001).degenerate);
}

TEST_CASE("constellation CSV round trip and diagnostics") {
    const auto p = init_params(Architecture::standard(8), 3);
    const auto c = export_constellation(p.encoder, 0.002).constellation;
    std::stringstream ss;
    write_constellation_csv(ss, c);
    const std::string text = ss.str();
    CHECK(text.rfind("index,probability,real,imag\n", 0) == 0);
    std::istringstream in(text);
    const auto back = read_constellation_csv(in);
    REQUIRE(back.size() == 8);
    for (std::size_t s = 0; s < 8; ++s) {
        CHECK(back.points[s] == c.points[s]);  // 17 digits round-trip exactly
        CHECK(back.probabilities[s] == c.probabilities[s]);
    }

    auto fails_on_line = [](const std::string& body, const std::string& needle) {
        std::istringstream bad(body);
        try {
            read_constellation_csv(bad);
        } catch (const FormatError& e) {
            return std::string(e.what()).find(needle) != std::string::npos;
        }
        return false;
    };
    CHECK(fails_on_line("", "no rows"));
    CHECK(fails_on_line("index,probability,real,imag\n", "no"));
    CHECK(fails_on_line("index,probability,real,imag\n0,0.5,1,2\n1,0.5,abc,2\n", "line 3"));
    CHECK(fails_on_line("index,probability,real,imag\n0,0.5,1\n", "line 2"));
    CHECK(fails_on_line("index,probability,real,imag\n1,0.5,1,2\n", "line 2"));
    CHECK(fails_on_line("wrong,header\n0,1,0,0\n", "header"));
}
