#include "swipt/harvester.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "swipt/errors.hpp"

namespace swipt {

std::string harvester_name(const HarvesterModel& model) {
    return std::holds_alternative<ModelAParams>(model) ? "A" : "B";
}

MomentSet compute_moments(std::span<const Symbol> points, std::span<const double> weights) {
    if (points.empty()) throw ConfigError("compute_moments: empty input");
    if (points.size() != weights.size()) throw ConfigError("compute_moments: weight count mismatch");
    MomentSet m;
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double w = weights[k];
        const double r = points[k].real();
        const double i = points[k].imag();
        const double r2 = r * r;
        const double i2 = i * i;
        const double pw = r2 + i2;
        m.q += w * pw * pw;
        m.t += w * pw * std::sqrt(pw);
        m.p += w * pw;
        m.mu_r += w * r;
        m.mu_i += w * i;
        m.q_r += w * r2 * r2;
        m.t_r += w * r2 * r;
        m.p_r += w * r2;
        m.q_i += w * i2 * i2;
        m.t_i += w * i2 * i;
        m.p_i += w * i2;
    }
    return m;
}

MomentSet compute_moments(std::span<const Symbol> batch) {
    std::vector<double> w(batch.size(), 1.0 / static_cast<double>(batch.size()));
    return compute_moments(batch, w);
}

MomentSet compute_moments(const Constellation& c) {
    return compute_moments(c.points, c.probabilities);
}

double q_tilde(const MomentSet& m) {
    return (m.q_r + m.q_i + 2.0 * (m.mu_r * m.t_r + m.mu_i * m.t_i) + 6.0 * m.p_r * m.p_i +
            6.0 * m.p_r * (m.p_r - m.mu_r * m.mu_r) + 6.0 * m.p_i * (m.p_i - m.mu_i * m.mu_i)) /
           3.0;
}

double pdel_model_a(const MomentSet& m, const ModelAParams& p) {
    return p.alpha * (m.q + q_tilde(m)) + p.beta * m.p + p.gamma;
}

double ModelBParams::omega() const { return 1.0 / (1.0 + std::exp(a * b)); }

double model_b_response(double p_in, const ModelBParams& p) {
    const double omega = p.omega();
    const double psi = p.ls / (1.0 + std::exp(-p.a * (p_in - p.b)));
    return (psi - p.ls * omega) / (1.0 - omega);
}

double model_b_slope(double p_in, const ModelBParams& p) {
    const double e = std::exp(-p.a * (p_in - p.b));
    const double sig = 1.0 / (1.0 + e);
    const double one_minus_sig = e / (1.0 + e);
    return p.ls * p.a * sig * one_minus_sig / (1.0 - p.omega());
}

double pdel_model_b(std::span<const double> symbol_powers, const ModelBParams& p) {
    if (symbol_powers.empty()) throw ConfigError("pdel_model_b: empty batch");
    double acc = 0.0;
    for (double pw : symbol_powers) {
        if (pw < 0.0) throw ConfigError("pdel_model_b: negative input power");
        acc += model_b_response(pw, p);
    }
    return acc / static_cast<double>(symbol_powers.size());
}

double delivered_power(std::span<const Symbol> batch, const HarvesterModel& model) {
    if (const auto* a = std::get_if<ModelAParams>(&model)) {
        return pdel_model_a(compute_moments(batch), *a);
    }
    std::vector<double> powers(batch.size());
    std::transform(batch.begin(), batch.end(), powers.begin(), [](Symbol x) { return std::norm(x); });
    return pdel_model_b(powers, std::get<ModelBParams>(model));
}

double delivered_power_gradient(std::span<const Symbol> points, std::span<const double> weights,
                                const HarvesterModel& model, std::span<Symbol> grad) {
    if (grad.size() != points.size() || weights.size() != points.size()) {
        throw ConfigError("delivered_power_gradient: size mismatch");
    }

    if (const auto* bp = std::get_if<ModelBParams>(&model)) {
        double acc = 0.0;
        for (std::size_t k = 0; k < points.size(); ++k) {
            const double pw = std::norm(points[k]);
            acc += weights[k] * model_b_response(pw, *bp);
            grad[k] = points[k] * (2.0 * weights[k] * model_b_slope(pw, *bp));
        }
        return acc;
    }

    const auto& ap = std::get<ModelAParams>(model);
    const MomentSet m = compute_moments(points, weights);
    // Partial derivatives of P_del with respect to each moment.
    const double third = ap.alpha / 3.0;
    const double d_q = ap.alpha;
    const double d_p = ap.beta;
    const double d_q_axis = third;
    const double d_mu_r = third * (2.0 * m.t_r - 12.0 * m.p_r * m.mu_r);
    const double d_mu_i = third * (2.0 * m.t_i - 12.0 * m.p_i * m.mu_i);
    const double d_t_r = third * 2.0 * m.mu_r;
    const double d_t_i = third * 2.0 * m.mu_i;
    const double d_p_r = third * (6.0 * m.p_i + 12.0 * m.p_r - 6.0 * m.mu_r * m.mu_r);
    const double d_p_i = third * (6.0 * m.p_r + 12.0 * m.p_i - 6.0 * m.mu_i * m.mu_i);

    for (std::size_t k = 0; k < points.size(); ++k) {
        const double r = points[k].real();
        const double i = points[k].imag();
        const double pw = r * r + i * i;
        const double common = 4.0 * d_q * pw + 2.0 * d_p;
        const double gr = common * r + d_mu_r + 4.0 * d_q_axis * r * r * r + 3.0 * d_t_r * r * r +
                          2.0 * d_p_r * r;
        const double gi = common * i + d_mu_i + 4.0 * d_q_axis * i * i * i + 3.0 * d_t_i * i * i +
                          2.0 * d_p_i * i;
        grad[k] = {weights[k] * gr, weights[k] * gi};
    }
    return pdel_model_a(m, ap);
}

double delivered_power_gradient(std::span<const Symbol> batch, const HarvesterModel& model,
                                std::span<Symbol> grad) {
    if (batch.empty()) throw ConfigError("delivered_power_gradient: empty batch");
    const std::vector<double> w(batch.size(), 1.0 / static_cast<double>(batch.size()));
    return delivered_power_gradient(batch, w, model, grad);
}

double delivered_power(const Constellation& c, const HarvesterModel& model) {
    if (const auto* a = std::get_if<ModelAParams>(&model)) {
        return pdel_model_a(compute_moments(c), *a);
    }
    const auto& bp = std::get<ModelBParams>(model);
    double acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        acc += c.probabilities[k] * model_b_response(std::norm(c.points[k]), bp);
    }
    return acc;
}

namespace {

std::vector<std::uint64_t> sample_counts(const Constellation& c, std::uint64_t first,
                                         std::uint64_t count, const RngStream& stream,
                                         const std::vector<double>& cdf) {
    std::vector<std::uint64_t> counts(c.size(), 0);
    for (std::uint64_t n = first; n < first + count; ++n) {
        const double u = stream.uniform(n);
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t k = std::min<std::size_t>(it - cdf.begin(), c.size() - 1);
        ++counts[k];
    }
    return counts;
}

std::vector<double> to_weights(const std::vector<std::uint64_t>& counts, std::uint64_t total) {
    std::vector<double> w(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        w[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
    }
    return w;
}

}  // namespace

MonteCarloEstimate pdel_monte_carlo_check(const Constellation& c, const HarvesterModel& model,
                                          std::uint64_t num_samples, const RngStream& stream) {
    if (num_samples < 10000) throw ConfigError("pdel_monte_carlo_check: need at least 1e4 samples");
    std::vector<double> cdf(c.size());
    std::partial_sum(c.probabilities.begin(), c.probabilities.end(), cdf.begin());

    MonteCarloEstimate est;
    est.samples = num_samples;

    if (const auto* bp = std::get_if<ModelBParams>(&model)) {
        const auto counts = sample_counts(c, 0, num_samples, stream, cdf);
        const auto w = to_weights(counts, num_samples);
        double mean = 0.0, second = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            const double f = model_b_response(std::norm(c.points[k]), *bp);
            mean += w[k] * f;
            second += w[k] * f * f;
        }
        est.value = mean;
        est.std_error = std::sqrt(std::max(0.0, second - mean * mean) / static_cast<double>(num_samples));
        return est;
    }

    // Batch means: moments are plugged into a nonlinear formula, so the
    // spread of per-batch estimates gives the standard error.
    const auto& ap = std::get<ModelAParams>(model);
    constexpr std::uint64_t kBatches = 100;
    const std::uint64_t per_batch = num_samples / kBatches;
    std::vector<std::uint64_t> total(c.size(), 0);
    std::vector<double> batch_values;
    batch_values.reserve(kBatches);
    for (std::uint64_t b = 0; b < kBatches; ++b) {
        const std::uint64_t first = b * per_batch;
        const std::uint64_t count = (b + 1 == kBatches) ? num_samples - first : per_batch;
        const auto counts = sample_counts(c, first, count, stream, cdf);
        for (std::size_t k = 0; k < c.size(); ++k) total[k] += counts[k];
        batch_values.push_back(pdel_model_a(compute_moments(c.points, to_weights(counts, count)), ap));
    }
    est.value = pdel_model_a(compute_moments(c.points, to_weights(total, num_samples)), ap);
    double mean = 0.0;
    for (double v : batch_values) mean += v;
    mean /= static_cast<double>(kBatches);
    double var = 0.0;
    for (double v : batch_values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(kBatches - 1);
    est.std_error = std::sqrt(var / static_cast<double>(kBatches));
    return est;
}

}  // namespace swipt
