#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swipt/chain.hpp"
#include "swipt/channel.hpp"
#include "swipt/harvester.hpp"
#include "swipt/nn.hpp"
#include "swipt/transceiver.hpp"

namespace swipt {

// lambda = 0 first, then start * factor^k for k = 0, 1, ...
struct LambdaSchedule {
    double start = 1e-5;
    double factor = 2.0;
    std::size_t max_points = 12;  // including lambda = 0

    std::vector<double> values() const;
};

struct TrainConfig {
    std::size_t messages = 16;
    double p_a = 0.001;
    double snr = 50.0;
    std::optional<double> noise_variance;  // overrides snr when set
    HarvesterModel harvester = ModelAParams{};
    std::size_t epochs = 1000;
    std::size_t minibatch_size = 1600;
    std::size_t train_set_size = 160000;
    double learning_rate = 0.01;
    std::size_t restarts = 10;
    LambdaSchedule lambda;
    double ser_max = 0.95;
    std::uint64_t seed = 1;
    Architecture arch = Architecture::standard(16);
    std::uint64_t eval_samples = 1600000;  // SER test set
    std::size_t cost_samples = 16000;      // samples behind final_cost

    // Desk-scale defaults for M messages.
    static TrainConfig desk(std::size_t messages);
    // Full-size constants: 1e5*M train set, 1e3*M minibatch, 5000 epochs,
    // 100 restarts, 5e6*M test set.
    static TrainConfig paper(std::size_t messages);

    ChannelParams channel() const;
    std::size_t steps_per_epoch() const { return train_set_size / minibatch_size; }
    // Throws ConfigError naming the offending field.
    void validate() const;
};

struct RunRecord {
    double lambda = 0.0;
    std::uint64_t seed = 0;
    double initial_cost = 0.0;  // cost of the first minibatch
    double final_cost = 0.0;
    double cross_entropy = 0.0;
    double ser = 1.0;
    double ser_stderr = 0.0;
    double p_del = 0.0;
    std::size_t epochs = 0;
    bool failed = false;    // diverged (NaN cost); never selected
    bool terminal = false;  // SER exceeded ser_max, sweep stopped here
    Constellation constellation;
    NetworkParams params;
    std::string checkpoint_ref;
};

struct StepInfo {
    std::size_t epoch = 0;
    std::size_t step = 0;  // global minibatch index
    CostBreakdown batch;
};

using StepObserver = std::function<void(const StepInfo&)>;

// Cost of a trained model on a fixed evaluation set: mean
// cross-entropy of the exported constellation through the channel and
// decoder, plus lambda / P_del of the exported constellation. The set is
// drawn from cfg.seed, so every restart is scored on the same samples.
CostBreakdown final_cost(const TrainConfig& cfg, const NetworkParams& params,
                         const Constellation& exported, double lambda);

// Monte-Carlo SER of the record's exported constellation and decoder on
// cfg.eval_samples draws seeded by cfg.seed.
void measure_ser(const TrainConfig& cfg, RunRecord& rec);

// One optimization run from a fresh initialization, SER included.
RunRecord train_run(const TrainConfig& cfg, double lambda, std::uint64_t seed,
                    const StepObserver& observer = {});

// Runs every seed (in parallel) and keeps the lowest final cost; ties go to
// the lowest seed. Only the kept record has its SER measured. Throws
// TrainingError if every run failed.
RunRecord multi_restart(const TrainConfig& cfg, double lambda, std::span<const std::uint64_t> seeds);
// Restart seeds cfg.seed, cfg.seed + 1, ..., cfg.seed + restarts - 1.
std::vector<std::uint64_t> restart_seeds(const TrainConfig& cfg);
// Index of the selected record, as multi_restart chooses it.
std::size_t select_best(std::span<const RunRecord> runs);

using RecordObserver = std::function<void(const RunRecord&)>;

// Best-of-restarts record per lambda until SER > ser_max (that record is
// kept and marked terminal) or max_points records.
std::vector<RunRecord> lambda_sweep(const TrainConfig& cfg, const RecordObserver& on_record = {});

}  // namespace swipt
