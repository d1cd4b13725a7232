#include "swipt/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "swipt/errors.hpp"
#include "swipt/evaluator.hpp"
#include "swipt/rng.hpp"

namespace swipt {

std::vector<double> LambdaSchedule::values() const {
    std::vector<double> out;
    if (max_points == 0) return out;
    out.push_back(0.0);
    double lambda = start;
    while (out.size() < max_points) {
        out.push_back(lambda);
        lambda *= factor;
    }
    return out;
}

TrainConfig TrainConfig::desk(std::size_t messages) {
    TrainConfig c;
    c.messages = messages;
    c.arch = Architecture::standard(messages);
    c.epochs = 1000;
    c.restarts = 10;
    c.minibatch_size = 100 * messages;
    c.train_set_size = 10000 * messages;
    c.eval_samples = 100000 * messages;
    c.cost_samples = 1000 * messages;
    return c;
}

TrainConfig TrainConfig::paper(std::size_t messages) {
    TrainConfig c = desk(messages);
    c.epochs = 5000;
    c.restarts = 100;
    c.minibatch_size = 1000 * messages;
    c.train_set_size = 100000 * messages;
    c.eval_samples = 5000000 * messages;
    return c;
}

ChannelParams TrainConfig::channel() const {
    if (noise_variance) return ChannelParams::from_variance(p_a, *noise_variance);
    return ChannelParams::from_snr(p_a, snr);
}

void TrainConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
        throw ConfigError(key + ": " + why);
    };
    if (messages < 2) fail("messages", "need at least 2 messages");
    if (!(p_a > 0.0) || !std::isfinite(p_a)) fail("p_a", "must be positive");
    if (!(snr > 0.0)) fail("snr", "must be positive");
    if (noise_variance && !(*noise_variance >= 0.0 && std::isfinite(*noise_variance))) {
        fail("noise_variance", "must be non-negative");
    }
    if (const auto* a = std::get_if<ModelAParams>(&harvester)) {
        if (!(a->alpha > 0.0) || !std::isfinite(a->alpha)) fail("harvester.alpha", "must be positive");
        if (!(a->beta >= 0.0) || !std::isfinite(a->beta)) fail("harvester.beta", "must be non-negative");
        if (!std::isfinite(a->gamma)) fail("harvester.gamma", "must be finite");
    } else {
        const auto& b = std::get<ModelBParams>(harvester);
        if (!(b.ls > 0.0) || !std::isfinite(b.ls)) fail("harvester.ls", "must be positive");
        if (!(b.a > 0.0) || !std::isfinite(b.a)) fail("harvester.a", "must be positive");
        if (!(b.b > 0.0) || !std::isfinite(b.b)) fail("harvester.b", "must be positive");
    }
    if (epochs == 0) fail("epochs", "must be positive");
    if (minibatch_size == 0) fail("minibatch_size", "must be positive");
    if (train_set_size == 0) fail("train_set_size", "must be positive");
    if (minibatch_size > train_set_size) fail("minibatch_size", "exceeds train_set_size");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate", "must be positive");
    if (restarts == 0) fail("restarts", "must be positive");
    if (!(lambda.start > 0.0) || !std::isfinite(lambda.start)) fail("lambda.start", "must be positive");
    if (!(lambda.factor > 1.0) || !std::isfinite(lambda.factor)) fail("lambda.factor", "must exceed 1");
    if (lambda.max_points == 0) fail("lambda.max_points", "must be positive");
    if (!(ser_max > 0.0 && ser_max < 1.0)) fail("ser_max", "must lie in (0, 1)");
    if (arch.messages != messages) fail("messages", "architecture built for a different M");
    for (auto w : arch.encoder_hidden) if (w == 0) fail("encoder.hidden", "zero-width layer");
    for (auto w : arch.decoder_hidden) if (w == 0) fail("decoder.hidden", "zero-width layer");
    if (eval_samples < 1000) fail("eval_samples", "must be at least 1000");
    if (cost_samples == 0) fail("cost_samples", "must be positive");
}

CostBreakdown final_cost(const TrainConfig& cfg, const NetworkParams& params,
                         const Constellation& exported, double lambda) {
    const RngStream msg_stream(cfg.seed, streams::kCostMessages);
    const RngStream noise_stream(cfg.seed, streams::kCostNoise);
    const double variance = cfg.channel().noise_variance;
    const auto m = static_cast<std::uint32_t>(exported.size());

    MlpWorkspace ws(params.decoder);
    std::vector<double> probs(params.decoder.out_dim());
    double ce = 0.0;
    for (std::size_t k = 0; k < cfg.cost_samples; ++k) {
        const Message s = msg_stream.below(k, m);
        Symbol y = exported.points[s];
        if (variance > 0.0) y += awgn_noise(noise_stream, k, variance);
        decode(params.decoder, y, ws, probs);
        ce += cross_entropy(s, probs);
    }
    CostBreakdown out;
    out.cross_entropy = ce / static_cast<double>(cfg.cost_samples);
    out.p_del = evaluate_power(exported, cfg.harvester);
    out.mean_power = exported.mean_power();
    out.cost = total_cost(out.cross_entropy, out.p_del, lambda);
    return out;
}

namespace {

RunRecord optimize(const TrainConfig& cfg, double lambda, std::uint64_t seed,
                   const StepObserver& observer) {
    cfg.validate();
    RunRecord rec;
    rec.lambda = lambda;
    rec.seed = seed;
    rec.params = init_params(cfg.arch, seed);

    const CostSpec spec{cfg.p_a, lambda, cfg.harvester};
    const double variance = cfg.channel().noise_variance;
    const RngStream msg_stream(seed, streams::kTrainMessages);
    const RngStream noise_stream(seed, streams::kTrainNoise);
    const auto m = static_cast<std::uint32_t>(cfg.messages);
    const std::size_t batch = cfg.minibatch_size;

    AdamHyper hyper;
    hyper.learning_rate = cfg.learning_rate;
    AdamState adam(rec.params, hyper);
    GradientTape tape = GradientTape::zeros_like(rec.params);
    std::vector<Message> messages(batch);
    std::vector<Symbol> noise(batch);

    std::uint64_t step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs && !rec.failed; ++epoch) {
        for (std::size_t i = 0; i < cfg.steps_per_epoch(); ++i, ++step) {
            const std::uint64_t base = step * batch;
            for (std::size_t k = 0; k < batch; ++k) {
                messages[k] = msg_stream.below(base + k, m);
                noise[k] = variance > 0.0 ? awgn_noise(noise_stream, base + k, variance) : Symbol{};
            }
            const auto result = cost_and_gradient(rec.params, messages, noise, spec, tape);
            if (step == 0) rec.initial_cost = result.cost;
            if (!std::isfinite(result.cost)) {
                rec.failed = true;
                break;
            }
            if (observer) observer(StepInfo{epoch, static_cast<std::size_t>(step), result});
            adam_step(rec.params, tape, adam);
        }
        rec.epochs = epoch + 1;
    }

    if (rec.failed) {
        rec.final_cost = std::numeric_limits<double>::quiet_NaN();
        return rec;
    }

    rec.constellation = export_constellation(rec.params.encoder, cfg.p_a).constellation;
    const auto fc = final_cost(cfg, rec.params, rec.constellation, lambda);
    if (!std::isfinite(fc.cost)) {
        rec.failed = true;
        rec.final_cost = std::numeric_limits<double>::quiet_NaN();
        return rec;
    }
    rec.final_cost = fc.cost;
    rec.cross_entropy = fc.cross_entropy;
    rec.p_del = fc.p_del;
    return rec;
}

}  // namespace

void measure_ser(const TrainConfig& cfg, RunRecord& rec) {
    if (rec.failed) return;
    const auto report = estimate_ser(rec.constellation, learned_detector(rec.params.decoder),
                                     cfg.channel(), cfg.eval_samples, cfg.seed);
    rec.ser = report.ser;
    rec.ser_stderr = report.ser_stderr;
}

RunRecord train_run(const TrainConfig& cfg, double lambda, std::uint64_t seed,
                    const StepObserver& observer) {
    auto rec = optimize(cfg, lambda, seed, observer);
    measure_ser(cfg, rec);
    return rec;
}

std::vector<std::uint64_t> restart_seeds(const TrainConfig& cfg) {
    std::vector<std::uint64_t> seeds(cfg.restarts);
    for (std::size_t r = 0; r < cfg.restarts; ++r) seeds[r] = cfg.seed + r;
    return seeds;
}

std::size_t select_best(std::span<const RunRecord> runs) {
    std::size_t best = runs.size();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        if (r.failed || !std::isfinite(r.final_cost)) continue;
        if (best == runs.size() || r.final_cost < runs[best].final_cost ||
            (r.final_cost == runs[best].final_cost && r.seed < runs[best].seed)) {
            best = i;
        }
    }
    if (best == runs.size()) throw TrainingError("every training run diverged");
    return best;
}

RunRecord multi_restart(const TrainConfig& cfg, double lambda, std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw ConfigError("multi_restart: no seeds");
    std::vector<RunRecord> runs(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(seeds.size()); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            runs[idx] = optimize(cfg, lambda, seeds[idx], {});
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    RunRecord best = std::move(runs[select_best(runs)]);
    measure_ser(cfg, best);
    return best;
}

std::vector<RunRecord> lambda_sweep(const TrainConfig& cfg, const RecordObserver& on_record) {
    cfg.validate();
    const auto seeds = restart_seeds(cfg);
    std::vector<RunRecord> records;
    for (double lambda : cfg.lambda.values()) {
        auto rec = multi_restart(cfg, lambda, seeds);
        rec.terminal = rec.ser > cfg.ser_max;
        records.push_back(std::move(rec));
        if (on_record) on_record(records.back());
        if (records.back().terminal) break;
    }
    return records;
}

}  // namespace swipt
