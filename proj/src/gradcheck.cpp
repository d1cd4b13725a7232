#include "swipt/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swipt/channel.hpp"
#include "swipt/errors.hpp"
#include "swipt/rng.hpp"

namespace swipt {

double relative_error(double analytic, double numeric, double floor) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / scale;
}

GradcheckReport check_gradient(const GradcheckCase& c, const GradcheckOptions& opt) {
    GradientTape tape = GradientTape::zeros_like(c.params);
    if (opt.kernel == GradientKernel::Serial) {
        cost_and_gradient_serial(c.params, c.messages, c.noise, c.spec, tape);
    } else {
        cost_and_gradient(c.params, c.messages, c.noise, c.spec, tape);
    }
    if (opt.corrupt_gradient) {
        auto blocks = param_blocks(tape.grads);
        blocks.front().values[0] = blocks.front().values[0] * 1.001 + 1e-3;
    }

    const auto power_term = [&](const CostBreakdown& b) {
        return c.spec.lambda / std::max(b.p_del, kPdelEpsilon);
    };

    const auto base = evaluate_cost(c.params, c.messages, c.noise, c.spec);
    const double floor =
        opt.floor_scale * std::max(1.0, std::abs(base.cross_entropy) + power_term(base));

    NetworkParams probe = c.params;
    auto probe_blocks = param_blocks(probe);
    const auto grad_blocks = param_blocks(static_cast<const NetworkParams&>(tape.grads));

    GradcheckReport report;
    for (std::size_t b = 0; b < probe_blocks.size(); ++b) {
        BlockError be;
        be.name = probe_blocks[b].name;
        auto values = probe_blocks[b].values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double saved = values[i];
            values[i] = saved + opt.step;
            const auto plus = evaluate_cost(probe, c.messages, c.noise, c.spec);
            values[i] = saved - opt.step;
            const auto minus = evaluate_cost(probe, c.messages, c.noise, c.spec);
            values[i] = saved;

            const double numeric = (plus.cross_entropy - minus.cross_entropy) / (2.0 * opt.step) +
                                   (power_term(plus) - power_term(minus)) / (2.0 * opt.step);
            const double analytic = grad_blocks[b].values[i];
            const double err = relative_error(analytic, numeric, floor);
            if (err > be.max_rel_error || i == 0) {
                be.max_rel_error = err;
                be.worst_index = i;
                be.analytic = analytic;
                be.numeric = numeric;
            }
        }
        report.max_rel_error = std::max(report.max_rel_error, be.max_rel_error);
        report.blocks.push_back(be);
    }
    return report;
}

namespace {

// Smallest |pre-activation| over every ReLU unit the minibatch touches.
double relu_margin(const Mlp& net, const std::vector<std::vector<std::vector<double>>>& acts) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& sample : acts) {
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const auto& layer = net.layers[l];
            if (layer.activation != Activation::ReLU) continue;
            for (std::size_t r = 0; r < layer.out_dim; ++r) {
                double z = layer.biases[r];
                for (std::size_t c = 0; c < layer.in_dim; ++c) z += layer.weight(r, c) * sample[l][c];
                margin = std::min(margin, std::abs(z));
            }
        }
    }
    return margin;
}

}  // namespace

GradcheckCase random_gradcheck_case(std::uint64_t seed, const HarvesterModel& model, double lambda,
                                    double p_a, double noise_variance) {
    const RngStream rng(seed, streams::kGradcheck);
    std::uint64_t ctr = 0;
    const std::size_t sizes[] = {4, 8, 16};
    const std::size_t m = sizes[rng.below(ctr++, 3)];

    Architecture arch = Architecture::standard(m);
    arch.encoder_hidden = {m + rng.below(ctr++, static_cast<std::uint32_t>(m))};
    arch.decoder_hidden = {m + rng.below(ctr++, static_cast<std::uint32_t>(m))};
    if (rng.below(ctr++, 2) == 1) arch.decoder_hidden.push_back(m);

    GradcheckCase c;
    c.params = init_params(arch, seed);
    const std::size_t batch = 16 + rng.below(ctr++, 49);
    for (std::size_t k = 0; k < batch; ++k) {
        c.messages.push_back(rng.below(ctr++, static_cast<std::uint32_t>(m)));
        c.noise.push_back(awgn_noise(rng, ctr++, noise_variance));
    }
    c.spec.p_a = p_a;
    c.spec.lambda = lambda;
    c.spec.harvester = model;

    // Redraw biases until no ReLU sits within kReluMargin of its kink, so a
    // central difference never straddles a non-differentiable point.
    for (int attempt = 0;; ++attempt) {
        for (auto& block : param_blocks(c.params)) {
            if (block.name.ends_with(".biases")) {
                for (double& v : block.values) v = 0.2 * (rng.uniform(ctr++) - 0.5);
            }
        }
        const auto rec = forward_chain(c.params, c.messages, c.noise, c.spec);
        const double margin = std::min(relu_margin(c.params.encoder, rec.encoder_acts),
                                       relu_margin(c.params.decoder, rec.decoder_acts));
        if (margin >= kReluMargin) break;
        if (attempt == 10000) throw TrainingError("gradcheck case generator: no kink-free bias draw");
    }
    c.label = "model " + harvester_name(model) + ", lambda " + std::to_string(lambda) + ", M " +
              std::to_string(m) + ", batch " + std::to_string(batch) + ", seed " +
              std::to_string(seed);
    return c;
}

GradcheckSuiteResult run_gradcheck_suite(const ModelAParams& model_a, const ModelBParams& model_b,
                                         double p_a, double noise_variance, std::uint64_t seed,
                                         std::size_t cases_per_setting,
                                         const GradcheckOptions& opt) {
    GradcheckSuiteResult result;
    const HarvesterModel models[] = {model_a, model_b};
    const double lambdas[] = {0.0, 1e-4, 1e-2};
    std::uint64_t case_seed = seed;
    for (const auto& model : models) {
        for (double lambda : lambdas) {
            for (std::size_t i = 0; i < cases_per_setting; ++i) {
                const auto c = random_gradcheck_case(case_seed++, model, lambda, p_a, noise_variance);
                auto report = check_gradient(c, opt);
                result.max_rel_error = std::max(result.max_rel_error, report.max_rel_error);
                result.cases.emplace_back(c.label, std::move(report));
            }
        }
    }
    return result;
}

}  // namespace swipt
