#include <doctest.h>

#include <cmath>
#include <numbers>

#include "swipt/errors.hpp"
#include "swipt/harvester.hpp"
#include "swipt/rng.hpp"

using namespace swipt;

namespace {

// Brute-force long double moments and Model A delivered power.
struct Brute {
    long double q = 0, p = 0, mr = 0, mi = 0;
    long double qr = 0, tr = 0, pr = 0, qi = 0, ti = 0, pi = 0;
};

Brute brute_moments(const std::vector<Symbol>& x, const std::vector<double>& w) {
    Brute b;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const long double r = x[k].real(), i = x[k].imag(), wk = w[k];
        const long double pw = r * r + i * i;
        b.q += wk * pw * pw;
        b.p += wk * pw;
        b.mr += wk * r;
        b.mi += wk * i;
        b.qr += wk * r * r * r * r;
        b.tr += wk * std::fabs(r * r * r) * (r < 0 ? -1 : 1);
        b.pr += wk * r * r;
        b.qi += wk * i * i * i * i;
        b.ti += wk * i * i * i;
        b.pi += wk * i * i;
    }
    return b;
}

long double brute_qt(const Brute& b) {
    return (b.qr + b.qi + 2 * (b.mr * b.tr + b.mi * b.ti) + 6 * b.pr * b.pi +
            6 * b.pr * (b.pr - b.mr * b.mr) + 6 * b.pi * (b.pi - b.mi * b.mi)) / 3;
}

long double brute_pdel_a(const std::vector<Symbol>& x, const std::vector<double>& w,
                         const ModelAParams& a) {
    const Brute b = brute_moments(x, w);
    return a.alpha * (b.q + brute_qt(b)) + a.beta * b.p + a.gamma;
}

long double brute_pdel_b(const std::vector<Symbol>& x, const std::vector<double>& w,
                         const ModelBParams& b) {
    const long double om = 1.0L / (1.0L + std::exp(static_cast<long double>(b.a) * b.b));
    long double acc = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const long double r = x[k].real(), i = x[k].imag();
        const long double psi = b.ls / (1.0L + std::exp(-b.a * (r * r + i * i - b.b)));
        acc += w[k] * (psi - b.ls * om) / (1.0L - om);
    }
    return acc;
}

long double brute_pdel(const std::vector<Symbol>& x, const std::vector<double>& w,
                       const HarvesterModel& model) {
    if (const auto* a = std::get_if<ModelAParams>(&model)) return brute_pdel_a(x, w, *a);
    return brute_pdel_b(x, w, std::get<ModelBParams>(model));
}

std::vector<Symbol> random_points(std::uint64_t seed, std::size_t n, double spread) {
    const RngStream s(seed, 60);
    std::vector<Symbol> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = spread * s.normal_pair(k);
    return x;
}

std::vector<double> random_weights(std::uint64_t seed, std::size_t n) {
    const RngStream s(seed, 61);
    std::vector<double> w(n);
    double sum = 0;
    for (std::size_t k = 0; k < n; ++k) sum += (w[k] = 0.1 + s.uniform(k));
    for (double& v : w) v /= sum;
    return w;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST_CASE("moments of a single deterministic symbol") {
    const double c = 0.7;
    const std::vector<Symbol> re{{c, 0}};
    const auto m = compute_moments(re);
    CHECK(m.q == doctest::Approx(std::pow(c, 4)));
    CHECK(m.t == doctest::Approx(std::pow(c, 3)));
    CHECK(m.p == doctest::Approx(c * c));
    CHECK(m.mu_r == c);
    CHECK(m.mu_i == 0.0);
    CHECK(m.t_r == doctest::Approx(std::pow(c, 3)));
    CHECK(m.q_i == 0.0);
    CHECK(q_tilde(m) == doctest::Approx(std::pow(c, 4)).epsilon(1e-14));

    const std::vector<Symbol> im{{0, c}};
    const auto n = compute_moments(im);
    CHECK(n.mu_i == c);
    CHECK(n.p_i == doctest::Approx(c * c));
    CHECK(q_tilde(n) == doctest::Approx(std::pow(c, 4)).epsilon(1e-14));

    const std::vector<Symbol> neg{{-c, 0}};
    CHECK(compute_moments(neg).t_r == doctest::Approx(-std::pow(c, 3)));
}

TEST_CASE("BPSK moments") {
    const std::vector<Symbol> bpsk{{1, 0}, {-1, 0}};
    const auto m = compute_moments(bpsk);
    CHECK(m.mu_r == 0.0);
    CHECK(m.t_r == 0.0);
    CHECK(m.p == 1.0);
    CHECK(m.q == 1.0);
    // (1 + 6 * 1 * 1) / 3
    CHECK(q_tilde(m) == doctest::Approx(7.0 / 3));
}

TEST_CASE("moments and Model A match a long double brute force") {
    const ModelAParams a;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = random_points(seed, 8, 0.03);
        const auto w = random_weights(seed, 8);
        const auto m = compute_moments(x, w);
        const Brute b = brute_moments(x, w);
        CHECK(rel(m.q, static_cast<double>(b.q)) < 1e-13);
        CHECK(rel(m.p_r, static_cast<double>(b.pr)) < 1e-13);
        CHECK(rel(q_tilde(m), static_cast<double>(brute_qt(b))) < 1e-12);
        CHECK(rel(pdel_model_a(m, a), static_cast<double>(brute_pdel_a(x, w, a))) < 1e-12);
    }
}

TEST_CASE("Q tilde edge cases") {
    const std::vector<Symbol> zero(4, Symbol{});
    CHECK(q_tilde(compute_moments(zero)) == 0.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto x = random_points(seed, 6, 1.0);
        const double before = q_tilde(compute_moments(x));
        for (auto& v : x) v = {v.imag(), v.real()};
        CHECK(rel(q_tilde(compute_moments(x)), before) < 1e-13);
    }
    CHECK_THROWS_AS(compute_moments(std::vector<Symbol>{}), ConfigError);
    CHECK_THROWS_AS(compute_moments(zero, std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("Model A examples") {
    const ModelAParams a{0.5, 0.2, 0.125};
    const std::vector<Symbol> zero(3, Symbol{});
    CHECK(pdel_model_a(compute_moments(zero), a) == 0.125);
    const double c = 0.3;
    const std::vector<Symbol> one{{c, 0}};
    CHECK(pdel_model_a(compute_moments(one), a) ==
          doctest::Approx(2 * a.alpha * std::pow(c, 4) + a.beta * c * c + a.gamma).epsilon(1e-14));
    CHECK(delivered_power(one, HarvesterModel{a}) == pdel_model_a(compute_moments(one), a));
}

TEST_CASE("Model A symmetry properties") {
    const HarvesterModel model{ModelAParams{}};
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto x = random_points(seed, 16, 0.03);
        const double base = delivered_power(x, model);
        auto neg = x, conj = x, rot = x;
        for (auto& v : neg) v = -v;
        for (auto& v : conj) v = std::conj(v);
        for (auto& v : rot) v = Symbol{-v.imag(), v.real()};
        CHECK(std::abs(delivered_power(neg, model) - base) < 1e-12);
        CHECK(std::abs(delivered_power(conj, model) - base) < 1e-12);
        CHECK(std::abs(delivered_power(rot, model) - base) < 1e-12);
    }
    // BPSK rotated by 45 degrees is not equivalent: Q tilde goes from 7/3 to 5/3.
    const ModelAParams a;
    const double c = 1.0;
    const std::vector<Symbol> axis{{c, 0}, {-c, 0}};
    const std::vector<Symbol> diag{std::polar(c, std::numbers::pi / 4), std::polar(c, 5 * std::numbers::pi / 4)};
    const std::vector<double> w{0.5, 0.5};
    const double d_axis = static_cast<double>(brute_pdel_a(axis, w, a));
    const double d_diag = static_cast<double>(brute_pdel_a(diag, w, a));
    CHECK(std::abs(delivered_power(axis, HarvesterModel{a}) - d_axis) < 1e-14);
    CHECK(std::abs(delivered_power(diag, HarvesterModel{a}) - d_diag) < 1e-14);
    CHECK(std::abs(d_axis - d_diag) > 1e-9);
    CHECK(d_axis - d_diag == doctest::Approx(a.alpha * 2.0 / 3).epsilon(1e-12));

    // A single deterministic point gives Q tilde = c^4 at any phase.
    for (double phase : {0.0, 0.3, std::numbers::pi / 4, 1.0}) {
        const std::vector<Symbol> one{std::polar(0.5, phase)};
        CHECK(q_tilde(compute_moments(one)) == doctest::Approx(0.0625).epsilon(1e-13));
    }
}

TEST_CASE("Model B examples") {
    const ModelBParams b;
    CHECK(std::abs(model_b_response(0.0, b)) < 1e-18);
    // At P_in = b the sigmoid is L_s / 2, shifted and rescaled by omega.
    const long double om = 1.0L / (1.0L + std::exp(static_cast<long double>(b.a * b.b)));
    const long double at_b = (0.01L - 0.02L * om) / (1.0L - om);
    CHECK(std::abs(model_b_response(b.b, b) - static_cast<double>(at_b)) < 1e-15);
    CHECK(std::abs(model_b_response(b.b, b) - 0.01) < 1e-8);
    CHECK(std::abs(model_b_response(0.03, b) - b.ls) < 1e-9);
    CHECK(pdel_model_b(std::vector<double>{0.0, 0.0}, b) == doctest::Approx(0.0));
    CHECK_THROWS_AS(pdel_model_b(std::vector<double>{}, b), ConfigError);
    CHECK_THROWS_AS(pdel_model_b(std::vector<double>{-1e-3}, b), ConfigError);
}

TEST_CASE("Model B is monotone and bounded on a grid") {
    const ModelBParams b;
    double prev = -1.0;
    for (int k = 0; k <= 1000; ++k) {
        const double p = 0.05 * k / 1000.0;
        const double v = model_b_response(p, b);
        CHECK(v >= prev);
        CHECK(v >= -1e-18);
        CHECK(v <= b.ls + 1e-15);
        CHECK(model_b_slope(p, b) >= 0.0);
        prev = v;
    }
}

TEST_CASE("Model B batch equals the probability-weighted sum") {
    const ModelBParams b;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = random_points(seed, 16, 0.04);
        const auto w = random_weights(seed, 16);
        Constellation c{x, w};
        long double exact = 0;
        for (std::size_t k = 0; k < 16; ++k) exact += w[k] * model_b_response(std::norm(x[k]), b);
        CHECK(std::abs(delivered_power(c, HarvesterModel{b}) - static_cast<double>(exact)) < 1e-12);
    }
    // Mixture linearity: the uniform batch average equals the two half averages.
    const auto x = random_points(3, 20, 0.05);
    const std::vector<Symbol> h1(x.begin(), x.begin() + 10), h2(x.begin() + 10, x.end());
    const HarvesterModel m{b};
    CHECK(std::abs(delivered_power(x, m) - 0.5 * (delivered_power(h1, m) + delivered_power(h2, m))) <
          1e-15);
}

TEST_CASE("delivered power gradient matches central differences") {
    const std::vector<std::pair<HarvesterModel, double>> cases{
        {HarvesterModel{ModelAParams{}}, 1.0}, {HarvesterModel{ModelAParams{0.4, 0.01, 0.2}}, 0.3},
        {HarvesterModel{ModelBParams{}}, 0.05}};
    for (const auto& [model, spread] : cases) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto x = random_points(seed, 8, spread);
            const auto w = random_weights(seed + 100, 8);
            std::vector<Symbol> g(8);
            const double value = delivered_power_gradient(x, w, model, g);
            Constellation c{x, w};
            CHECK(std::abs(value - delivered_power(c, model)) < 1e-15);
            // Differences of the long double oracle, step scaled to the coordinates.
            const double h = 1e-6 * spread;
            double worst = 0, gmax = 0;
            for (const auto& v : g) gmax = std::max({gmax, std::abs(v.real()), std::abs(v.imag())});
            for (std::size_t k = 0; k < 8; ++k) {
                for (int part = 0; part < 2; ++part) {
                    auto plus = x, minus = x;
                    const Symbol d = part == 0 ? Symbol{h, 0} : Symbol{0, h};
                    plus[k] += d;
                    minus[k] -= d;
                    const double num = static_cast<double>(
                        (brute_pdel(plus, w, model) - brute_pdel(minus, w, model)) / (2.0L * h));
                    const double ana = part == 0 ? g[k].real() : g[k].imag();
                    worst = std::max(worst, std::abs(num - ana) / std::max({std::abs(num), std::abs(ana), 1e-3 * gmax}));
                }
            }
            INFO("model " << harvester_name(model) << " spread " << spread << " seed " << seed);
            CHECK(worst < 1e-6);
        }
    }
    std::vector<Symbol> g(2);
    CHECK_THROWS_AS(delivered_power_gradient(std::vector<Symbol>(3), HarvesterModel{ModelAParams{}}, g),
                    ConfigError);
}

TEST_CASE("central-difference error shrinks like h^2") {
    // Model A is a quartic polynomial, so the error is h^2 f'''/6 + O(h^4).
    const HarvesterModel model{ModelAParams{}};
    const auto x = random_points(9, 4, 1.0);
    const std::vector<double> w(4, 0.25);
    std::vector<Symbol> g(4);
    delivered_power_gradient(x, w, model, g);
    auto err = [&](double h) {
        auto plus = x, minus = x;
        plus[1] += h;
        minus[1] -= h;
        const long double num = (brute_pdel(plus, w, model) - brute_pdel(minus, w, model)) / (2.0L * h);
        return std::abs(static_cast<double>(num) - g[1].real());
    };
    const double e1 = err(4e-2), e2 = err(2e-2), e3 = err(1e-2);
    CHECK(e1 > 1e-6);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("Monte-Carlo cross-check agrees with the closed forms") {
    const RngStream s(42, streams::kMonteCarlo);
    const HarvesterModel a{ModelAParams{}};
    const HarvesterModel b{ModelBParams{}};
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        Constellation c{random_points(seed, 8, 0.03), random_weights(seed, 8)};
        const auto ea = pdel_monte_carlo_check(c, a, 1000000, RngStream(seed, streams::kMonteCarlo));
        CHECK(std::abs(ea.value - delivered_power(c, a)) < 3 * ea.std_error);
        const auto eb = pdel_monte_carlo_check(c, b, 1000000, RngStream(seed, streams::kMonteCarlo));
        CHECK(std::abs(eb.value - delivered_power(c, b)) < 3 * eb.std_error);
    }
    const Constellation single = Constellation::uniform({Symbol{0.04, -0.01}});
    CHECK(pdel_monte_carlo_check(single, a, 10000, s).value == delivered_power(single, a));
    CHECK(pdel_monte_carlo_check(single, b, 10000, s).value == delivered_power(single, b));
    CHECK_THROWS_AS(pdel_monte_carlo_check(single, a, 9999, s), ConfigError);
}
