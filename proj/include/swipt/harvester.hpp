#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include "swipt/rng.hpp"
#include "swipt/transceiver.hpp"

namespace swipt {

// Statistics of the channel input x = x_r + j x_i.
//   Q = E|x|^4, T = E|x|^3, P = E|x|^2, mu = E[x],
//   Q_r = E[x_r^4], T_r = E[x_r^3], P_r = E[x_r^2] (same for the imaginary part).
struct MomentSet {
    double q = 0.0, t = 0.0, p = 0.0;
    double mu_r = 0.0, mu_i = 0.0;
    double q_r = 0.0, t_r = 0.0, p_r = 0.0;
    double q_i = 0.0, t_i = 0.0, p_i = 0.0;
};

// Small-signal model: P_del = alpha (Q + Q~) + beta P + gamma.
struct ModelAParams {
    double alpha = 0.3829;
    double beta = 0.0034;
    double gamma = 0.0;
};

// Saturating sigmoid model, applied per symbol with P_in = |x|^2:
//   Psi = L_s / (1 + exp(-a (P_in - b))), Omega = 1 / (1 + exp(a b)),
//   P_del = (Psi - L_s Omega) / (1 - Omega).
struct ModelBParams {
    double ls = 0.02;
    double a = 6400.0;
    double b = 0.003;

    double omega() const;
};

using HarvesterModel = std::variant<ModelAParams, ModelBParams>;

std::string harvester_name(const HarvesterModel& model);  // "A" or "B"

// Arithmetic mean over a batch.
MomentSet compute_moments(std::span<const Symbol> batch);
// Expectation under the constellation's probabilities.
MomentSet compute_moments(const Constellation& c);
MomentSet compute_moments(std::span<const Symbol> points, std::span<const double> weights);

double q_tilde(const MomentSet& m);
double pdel_model_a(const MomentSet& m, const ModelAParams& p);

// Per-symbol delivered power and its derivative in P_in.
double model_b_response(double p_in, const ModelBParams& p);
double model_b_slope(double p_in, const ModelBParams& p);
// Batch average of the per-symbol response. Powers must be non-negative.
double pdel_model_b(std::span<const double> symbol_powers, const ModelBParams& p);

// P_del of a batch under uniform weights (training path).
double delivered_power(std::span<const Symbol> batch, const HarvesterModel& model);
// Same, and writes dP_del/dx_k into grad (as d/dRe + j d/dIm).
double delivered_power_gradient(std::span<const Symbol> batch, const HarvesterModel& model,
                                std::span<Symbol> grad);
// Weighted form: P_del of sum_k w_k delta(x_k), gradient per point.
double delivered_power_gradient(std::span<const Symbol> points, std::span<const double> weights,
                                const HarvesterModel& model, std::span<Symbol> grad);
// Exact probability-weighted P_del of a constellation.
double delivered_power(const Constellation& c, const HarvesterModel& model);

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

// Sampling cross-check of P_del. Messages are drawn from the constellation's
// probabilities; Model A plugs the sampled moments into the closed form
// (standard error by batch means), Model B averages the per-symbol response.
MonteCarloEstimate pdel_monte_carlo_check(const Constellation& c, const HarvesterModel& model,
                                          std::uint64_t num_samples, const RngStream& stream);

}  // namespace swipt
