#include "swipt/run_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "swipt/checkpoint.hpp"
#include "swipt/errors.hpp"
#include "swipt/svg_plot.hpp"

namespace swipt {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    return out;
}

}  // namespace

std::string lambda_dir_name(double lambda) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", lambda);
    return buf;
}

void write_run_meta(std::ostream& out, const RunRecord& rec, const TrainConfig& cfg) {
    out << "lambda = " << g17(rec.lambda) << '\n'
        << "seed = " << rec.seed << '\n'
        << "final_cost = " << g17(rec.final_cost) << '\n'
        << "ser = " << g17(rec.ser) << '\n'
        << "p_del = " << g17(rec.p_del) << '\n'
        << "epochs = " << rec.epochs << '\n'
        << "M = " << cfg.messages << '\n'
        << "P_a = " << g17(cfg.p_a) << '\n'
        << "snr = " << g17(cfg.channel().snr) << '\n'
        << "harvester_model = " << harvester_name(cfg.harvester) << '\n'
        << "terminal = " << (rec.terminal ? "true" : "false") << '\n'
        << "cross_entropy = " << g17(rec.cross_entropy) << '\n'
        << "ser_stderr = " << g17(rec.ser_stderr) << '\n';
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
    std::map<std::string, std::string> kv;
    for (const auto& [k, v] : parse_key_values(in)) kv[k] = v;
    return kv;
}

void write_sweep_summary(std::ostream& out, std::span<const RunRecord> records) {
    out << "lambda,seed,final_cost,cross_entropy,ser,p_del,terminal\n";
    for (const auto& r : records) {
        out << g17(r.lambda) << ',' << r.seed << ',' << g17(r.final_cost) << ','
            << g17(r.cross_entropy) << ',' << g17(r.ser) << ',' << g17(r.p_del) << ','
            << (r.terminal ? 1 : 0) << '\n';
    }
}

void write_eval_report(std::ostream& out, const EvalReport& r) {
    out << "ser = " << g17(r.ser) << '\n'
        << "ser_stderr = " << g17(r.ser_stderr) << '\n'
        << "p_del = " << g17(r.p_del) << '\n'
        << "rate_bits = " << g17(r.rate_bits) << '\n'
        << "num_samples = " << r.num_samples << '\n';
}

void persist_run(const std::filesystem::path& dir, RunRecord& rec, const RunConfig& rc) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw FormatError("cannot create " + dir.string() + ": " + ec.message());
    rec.checkpoint_ref = (dir / "checkpoint").string();
    save_checkpoint(dir / "checkpoint", rec.params);
    {
        auto out = open_out(dir / "meta");
        write_run_meta(out, rec, rc.train);
    }
    {
        auto out = open_out(dir / "constellation.csv");
        write_constellation_csv(out, rec.constellation);
    }
    {
        auto out = open_out(dir / "plot.svg");
        out << render_constellation_svg(rec.constellation, rc.plot.size_px,
                                        "model " + harvester_name(rc.train.harvester) +
                                            ", lambda " + lambda_dir_name(rec.lambda));
    }
}

}  // namespace swipt
