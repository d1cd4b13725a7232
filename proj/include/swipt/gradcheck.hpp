#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swipt/chain.hpp"

namespace swipt {

// One fixed minibatch (messages and noise) plus parameters to differentiate at.
struct GradcheckCase {
    NetworkParams params;
    std::vector<Message> messages;
    std::vector<Symbol> noise;
    CostSpec spec;
    std::string label;
};

struct BlockError {
    std::string name;
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

struct GradcheckReport {
    double max_rel_error = 0.0;
    std::vector<BlockError> blocks;
};

enum class GradientKernel { Parallel, Serial };

struct GradcheckOptions {
    double step = 1e-5;
    // Entries below floor_scale * max(1, |CE| + |lambda / P_del|) are compared
    // in absolute terms against that floor. Central-difference roundoff grows
    // with the cost magnitude (about eps * |cost| / step), so smaller entries
    // cannot be resolved to the tolerance.
    double floor_scale = 1e-4;
    GradientKernel kernel = GradientKernel::Parallel;
    // Test hook: perturb one analytic entry to prove the harness can fail.
    bool corrupt_gradient = false;
};

inline constexpr double kGradcheckTolerance = 1e-6;

// |a - n| / max(|a|, |n|, floor)
double relative_error(double analytic, double numeric, double floor);

// Central differences of the cost assembled from evaluate_cost. The
// cross-entropy and power terms are differenced separately and summed.
GradcheckReport check_gradient(const GradcheckCase& c, const GradcheckOptions& opt = {});

// Minimum distance of any ReLU pre-activation from zero in generated cases.
inline constexpr double kReluMargin = 1e-4;

// Random parameters (Xavier weights, small random biases), message batch and
// noise for the given model and lambda.
GradcheckCase random_gradcheck_case(std::uint64_t seed, const HarvesterModel& model, double lambda,
                                    double p_a, double noise_variance);

struct GradcheckSuiteResult {
    double max_rel_error = 0.0;
    std::vector<std::pair<std::string, GradcheckReport>> cases;
    bool passed() const { return max_rel_error < kGradcheckTolerance; }
};

// Cases over both harvester models and lambda in {0, 1e-4, 1e-2}.
GradcheckSuiteResult run_gradcheck_suite(const ModelAParams& model_a, const ModelBParams& model_b,
                                         double p_a, double noise_variance, std::uint64_t seed,
                                         std::size_t cases_per_setting,
                                         const GradcheckOptions& opt = {});

}  // namespace swipt
