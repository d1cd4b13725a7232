#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "swipt/config.hpp"
#include "swipt/evaluator.hpp"
#include "swipt/trainer.hpp"

namespace swipt {

// Directory name for one lambda point, e.g. "0", "1e-05", "0.00032".
std::string lambda_dir_name(double lambda);

// Run metadata, `key = value` per line with keys
// lambda, seed, final_cost, ser, p_del, epochs, M, P_a, snr, harvester_model, terminal
// followed by cross_entropy and ser_stderr.
void write_run_meta(std::ostream& out, const RunRecord& rec, const TrainConfig& cfg);
std::map<std::string, std::string> read_key_values(std::istream& in);

// Sweep summary CSV: lambda,seed,final_cost,cross_entropy,ser,p_del,terminal
void write_sweep_summary(std::ostream& out, std::span<const RunRecord> records);

// Evaluation report: ser, ser_stderr, p_del, rate_bits, num_samples.
void write_eval_report(std::ostream& out, const EvalReport& r);

// Writes meta, constellation.csv, checkpoint and plot.svg into dir and sets
// rec.checkpoint_ref.
void persist_run(const std::filesystem::path& dir, RunRecord& rec, const RunConfig& rc);

}  // namespace swipt
