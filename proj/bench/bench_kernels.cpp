#include <benchmark/benchmark.h>

#include "swipt/chain.hpp"
#include "swipt/evaluator.hpp"
#include "swipt/rng.hpp"

using namespace swipt;

namespace {

struct Batch {
    NetworkParams params;
    std::vector<Message> messages;
    std::vector<Symbol> noise;
    CostSpec spec;
};

Batch make_batch(std::size_t m, std::size_t n) {
    Batch b;
    b.params = init_params(Architecture::standard(m), 1);
    b.spec = CostSpec{0.001, 1e-3, ModelBParams{}};
    const RngStream s(1, 50);
    for (std::size_t k = 0; k < n; ++k) {
        b.messages.push_back(s.below(2 * k, static_cast<std::uint32_t>(m)));
        b.noise.push_back(0.0045 * s.normal_pair(2 * k + 1));
    }
    return b;
}

void BM_CostGradient(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto b = make_batch(m, 100 * m);
    auto tape = GradientTape::zeros_like(b.params);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cost_and_gradient(b.params, b.messages, b.noise, b.spec, tape));
    }
}

void BM_CostGradientSerial(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto b = make_batch(m, 100 * m);
    auto tape = GradientTape::zeros_like(b.params);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cost_and_gradient_serial(b.params, b.messages, b.noise, b.spec, tape));
    }
}

void BM_Ser(benchmark::State& state) {
    const auto c = classical_baseline(BaselineKind::QAM, 16, 0.001);
    const auto ch = ChannelParams::from_snr(0.001, 50);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_ser(c, ml_detector(c), ch, 200000, 1));
}

void BM_SerSerial(benchmark::State& state) {
    const auto c = classical_baseline(BaselineKind::QAM, 16, 0.001);
    const auto ch = ChannelParams::from_snr(0.001, 50);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_ser_serial(c, ml_detector(c), ch, 200000, 1));
}

}  // namespace

BENCHMARK(BM_CostGradient)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CostGradientSerial)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ser)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SerSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
