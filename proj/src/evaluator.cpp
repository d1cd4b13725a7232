#include "swipt/evaluator.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <memory>

#include "swipt/errors.hpp"

namespace swipt {

DetectorFactory learned_detector(const Mlp& decoder) {
    return [&decoder]() -> DetectorFn {
        auto ws = std::make_shared<MlpWorkspace>(decoder);
        auto probs = std::make_shared<std::vector<double>>(decoder.out_dim());
        return [&decoder, ws, probs](Symbol y) {
            decode(decoder, y, *ws, *probs);
            return detect(*probs);
        };
    };
}

DetectorFactory ml_detector(const Constellation& c) {
    return [&c]() -> DetectorFn { return [&c](Symbol y) { return ml_detect(c, y); }; };
}

Message ml_detect(const Constellation& c, Symbol y) {
    if (c.points.empty()) throw ConfigError("ml_detect: empty constellation");
    Message best = 0;
    double best_d = std::norm(y - c.points[0]);
    for (std::size_t k = 1; k < c.size(); ++k) {
        const double d = std::norm(y - c.points[k]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<Message>(k);
        }
    }
    return best;
}

namespace {

std::uint64_t count_errors(const Constellation& c, const DetectorFn& detect_fn,
                           const ChannelParams& channel, std::uint64_t first, std::uint64_t last,
                           std::uint64_t seed) {
    const RngStream messages(seed, streams::kEvalMessages);
    const RngStream noise(seed, streams::kEvalNoise);
    const auto m = static_cast<std::uint32_t>(c.size());
    std::uint64_t errors = 0;
    for (std::uint64_t i = first; i < last; ++i) {
        const Message s = messages.below(i, m);
        Symbol y = c.points[s];
        if (channel.noise_variance > 0.0) y += awgn_noise(noise, i, channel.noise_variance);
        if (detect_fn(y) != s) ++errors;
    }
    return errors;
}

EvalReport make_report(std::uint64_t errors, std::uint64_t n) {
    EvalReport r;
    r.errors = errors;
    r.num_samples = n;
    r.ser = static_cast<double>(errors) / static_cast<double>(n);
    r.ser_stderr = std::sqrt(r.ser * (1.0 - r.ser) / static_cast<double>(n));
    return r;
}

void check_samples(std::uint64_t n) {
    if (n < 1000) throw ConfigError("estimate_ser: need at least 1000 samples");
}

}  // namespace

EvalReport estimate_ser_serial(const Constellation& c, const DetectorFactory& detector,
                               const ChannelParams& channel, std::uint64_t num_samples,
                               std::uint64_t seed) {
    check_samples(num_samples);
    const auto fn = detector();
    return make_report(count_errors(c, fn, channel, 0, num_samples, seed), num_samples);
}

EvalReport estimate_ser(const Constellation& c, const DetectorFactory& detector,
                        const ChannelParams& channel, std::uint64_t num_samples,
                        std::uint64_t seed, unsigned shards) {
    check_samples(num_samples);
    if (shards == 0) {
#ifdef _OPENMP
        shards = static_cast<unsigned>(omp_get_max_threads());
#else
        shards = 1;
#endif
    }
    const std::uint64_t per_shard = (num_samples + shards - 1) / shards;
    std::uint64_t errors = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : errors)
    for (long sh = 0; sh < static_cast<long>(shards); ++sh) {
        const std::uint64_t first = static_cast<std::uint64_t>(sh) * per_shard;
        const std::uint64_t last = std::min(num_samples, first + per_shard);
        if (first >= last) continue;
        const auto fn = detector();
        errors += count_errors(c, fn, channel, first, last, seed);
    }
    return make_report(errors, num_samples);
}

double evaluate_power(const Constellation& c, const HarvesterModel& model) {
    return delivered_power(c, model);
}

EvalReport evaluate_model(const Constellation& c, const Mlp& decoder, const ChannelParams& channel,
                          const HarvesterModel& model, std::uint64_t num_samples,
                          std::uint64_t seed) {
    auto report = estimate_ser(c, learned_detector(decoder), channel, num_samples, seed);
    report.p_del = evaluate_power(c, model);
    report.rate_bits = std::log2(static_cast<double>(c.size()));
    return report;
}

Constellation classical_baseline(BaselineKind kind, std::size_t messages, double p_a) {
    if (messages != 4 && messages != 8 && messages != 16 && messages != 32) {
        throw ConfigError("classical_baseline: unsupported M=" + std::to_string(messages));
    }
    std::vector<Symbol> pts;
    if (kind == BaselineKind::PSK) {
        for (std::size_t k = 0; k < messages; ++k) {
            const double phase = std::numbers::pi * (2.0 * static_cast<double>(k) + 1.0) /
                                 static_cast<double>(messages);
            pts.push_back(std::polar(1.0, phase));
        }
    } else {
        int cols = 0, rows = 0;
        switch (messages) {
            case 4: cols = rows = 2; break;
            case 8: cols = 4; rows = 2; break;
            case 16: cols = rows = 4; break;
            default: cols = rows = 6; break;  // 32: 6x6 grid without its corners
        }
        for (int ci = 0; ci < cols; ++ci) {
            for (int ri = 0; ri < rows; ++ri) {
                const double re = 2.0 * ci - (cols - 1);
                const double im = 2.0 * ri - (rows - 1);
                if (messages == 32 && std::abs(re) == 5.0 && std::abs(im) == 5.0) continue;
                pts.emplace_back(re, im);
            }
        }
    }
    double power = 0.0;
    for (const auto& p : pts) power += std::norm(p);
    power /= static_cast<double>(pts.size());
    const double scale = std::sqrt(p_a / power);
    for (auto& p : pts) p *= scale;
    return Constellation::uniform(std::move(pts));
}

}  // namespace swipt
