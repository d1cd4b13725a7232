#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "swipt/chain.hpp"
#include "swipt/errors.hpp"
#include "swipt/gradcheck.hpp"

using namespace swipt;

namespace {

double max_abs(const NetworkParams& p) {
    double m = 0;
    for (const auto* net : {&p.encoder, &p.decoder}) {
        for (const auto& l : net->layers) {
            for (double v : l.weights) m = std::max(m, std::abs(v));
            for (double v : l.biases) m = std::max(m, std::abs(v));
        }
    }
    return m;
}

double max_diff(const NetworkParams& a, const NetworkParams& b) {
    double m = 0;
    const Mlp* na[] = {&a.encoder, &a.decoder};
    const Mlp* nb[] = {&b.encoder, &b.decoder};
    for (int n = 0; n < 2; ++n) {
        for (std::size_t l = 0; l < na[n]->layers.size(); ++l) {
            const auto& x = na[n]->layers[l];
            const auto& y = nb[n]->layers[l];
            for (std::size_t i = 0; i < x.weights.size(); ++i) m = std::max(m, std::abs(x.weights[i] - y.weights[i]));
            for (std::size_t i = 0; i < x.biases.size(); ++i) m = std::max(m, std::abs(x.biases[i] - y.biases[i]));
        }
    }
    return m;
}

bool identical(const NetworkParams& a, const NetworkParams& b) { return max_diff(a, b) == 0.0; }

GradcheckCase big_case(std::uint64_t seed, const HarvesterModel& model, double lambda) {
    // More samples than one chunk so the parallel reduction is exercised.
    auto c = random_gradcheck_case(seed, model, lambda, 0.001, 2e-5);
    const auto m = static_cast<Message>(c.params.encoder.in_dim());
    const RngStream s(seed, 99);
    c.messages.resize(1000);
    c.noise.resize(1000);
    for (std::size_t k = 0; k < 1000; ++k) {
        c.messages[k] = s.below(2 * k, m);
        c.noise[k] = 0.0045 * s.normal_pair(2 * k + 1);
    }
    return c;
}

}  // namespace

TEST_CASE("total_cost examples") {
    CHECK(total_cost(std::log(32.0), 1.0, 0.1) == doctest::Approx(3.5657359).epsilon(1e-8));
    CHECK(total_cost(0.5, 0.0, 0.0) == 0.5);
    CHECK(total_cost(0.5, 0.0, 1e-3) == doctest::Approx(0.5 + 1e-3 / kPdelEpsilon));
    CHECK(total_cost(0.5, 1e-20, 1e-3) == total_cost(0.5, 0.0, 1e-3));
}

TEST_CASE("forward record agrees with evaluate_cost") {
    for (const HarvesterModel& model : {HarvesterModel{ModelAParams{}}, HarvesterModel{ModelBParams{}}}) {
        const auto c = big_case(3, model, 1e-3);
        const auto rec = forward_chain(c.params, c.messages, c.noise, c.spec);
        const auto direct = evaluate_cost(c.params, c.messages, c.noise, c.spec);
        CHECK(rec.valid);
        CHECK(rec.result.cost == doctest::Approx(direct.cost).epsilon(1e-14));
        CHECK(std::abs(direct.mean_power - 0.001) < 1e-12);
        CHECK(direct.p_del == doctest::Approx(delivered_power(rec.normalized.symbols, model)).epsilon(1e-14));
    }
}

TEST_CASE("backward_chain rejects an empty record") {
    const auto c = random_gradcheck_case(1, ModelAParams{}, 0.0, 0.001, 2e-5);
    auto tape = GradientTape::zeros_like(c.params);
    CHECK_THROWS_AS(backward_chain(c.params, ForwardRecord{}, tape), ConfigError);
}

TEST_CASE("parallel kernel matches the serial reference") {
    for (const HarvesterModel& model : {HarvesterModel{ModelAParams{}}, HarvesterModel{ModelBParams{}}}) {
        for (double lambda : {0.0, 1e-4, 1e-2}) {
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                const auto c = big_case(seed, model, lambda);
                auto ts = GradientTape::zeros_like(c.params);
                auto tp = GradientTape::zeros_like(c.params);
                const auto rs = cost_and_gradient_serial(c.params, c.messages, c.noise, c.spec, ts);
                const auto rp = cost_and_gradient(c.params, c.messages, c.noise, c.spec, tp);
                CHECK(std::abs(rp.cost - rs.cost) <= 1e-12 * std::abs(rs.cost));
                CHECK(rp.p_del == doctest::Approx(rs.p_del).epsilon(1e-13));
                CHECK(max_diff(ts.grads, tp.grads) <= 1e-12 * std::max(1.0, max_abs(ts.grads)));
            }
        }
    }
}

TEST_CASE("parallel kernel is independent of the thread count") {
    const auto c = big_case(7, ModelBParams{}, 1e-3);
    const int saved = omp_get_max_threads();
    auto run = [&](int threads) {
        omp_set_num_threads(threads);
        auto tape = GradientTape::zeros_like(c.params);
        const auto r = cost_and_gradient(c.params, c.messages, c.noise, c.spec, tape);
        return std::make_pair(r.cost, tape.grads);
    };
    const auto one = run(1);
    const auto three = run(3);
    const auto four = run(4);
    omp_set_num_threads(saved);
    CHECK(one.first == three.first);
    CHECK(one.first == four.first);
    CHECK(identical(one.second, three.second));
    CHECK(identical(one.second, four.second));
}

TEST_CASE("gradient check suite passes for both kernels") {
    for (auto kernel : {GradientKernel::Parallel, GradientKernel::Serial}) {
        GradcheckOptions opt;
        opt.kernel = kernel;
        const auto suite = run_gradcheck_suite(ModelAParams{}, ModelBParams{}, 0.001, 2e-5, 1, 2, opt);
        CHECK(suite.cases.size() == 12);
        CHECK(suite.max_rel_error < kGradcheckTolerance);
        CHECK(suite.passed());
    }
}

TEST_CASE("gradient check fails on a corrupted gradient") {
    GradcheckOptions opt;
    opt.corrupt_gradient = true;
    const auto c = random_gradcheck_case(2, ModelAParams{}, 1e-4, 0.001, 2e-5);
    const auto r = check_gradient(c, opt);
    CHECK(r.max_rel_error > 1e-3);
    CHECK_FALSE(r.blocks.empty());
}

TEST_CASE("relative_error definition") {
    CHECK(relative_error(1.0, 1.0, 1e-3) == 0.0);
    CHECK(relative_error(2.0, 1.0, 1e-3) == 0.5);
    CHECK(relative_error(1e-9, 0.0, 1e-3) == doctest::Approx(1e-6));
}
