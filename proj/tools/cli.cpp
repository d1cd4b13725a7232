#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "swipt/checkpoint.hpp"
#include "swipt/config.hpp"
#include "swipt/errors.hpp"
#include "swipt/evaluator.hpp"
#include "swipt/gradcheck.hpp"
#include "swipt/run_io.hpp"
#include "swipt/svg_plot.hpp"
#include "swipt/trainer.hpp"

namespace swipt::cli {

namespace {

std::string dims_string(const std::vector<std::size_t>& dims) {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "-" : "") + std::to_string(dims[i]);
    return s;
}

KeyValues parse_sets(const std::vector<std::string>& sets) {
    KeyValues kv;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
        kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return kv;
}

std::string g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::filesystem::path profile_root(const RunConfig& rc) { return rc.output_dir / rc.profile; }

void describe(std::ostream& out, const RunRecord& r) {
    out << "lambda " << g(r.lambda) << "  seed " << r.seed << "  cost " << g(r.final_cost) << "  ce "
        << g(r.cross_entropy) << "  ser " << g(r.ser) << "  p_del " << g(r.p_del)
        << (r.terminal ? "  [terminal]" : "") << '\n';
}

int cmd_train(const std::string& config, const KeyValues& overrides, bool paper, std::ostream& out) {
    const auto rc = load_config(config, overrides, paper);
    const auto seeds = restart_seeds(rc.train);
    auto rec = multi_restart(rc.train, rc.lambda, seeds);
    const auto dir = profile_root(rc) / lambda_dir_name(rec.lambda);
    persist_run(dir, rec, rc);
    describe(out, rec);
    out << "wrote " << dir.string() << '\n';
    return kOk;
}

int cmd_sweep(const std::string& config, const KeyValues& overrides, bool paper, std::ostream& out) {
    const auto rc = load_config(config, overrides, paper);
    const auto root = profile_root(rc);
    auto records = lambda_sweep(rc.train, [&](const RunRecord& r) { describe(out, r); out.flush(); });
    for (auto& r : records) persist_run(root / lambda_dir_name(r.lambda), r, rc);
    std::ofstream summary(root / "summary.csv", std::ios::trunc);
    if (!summary) throw FormatError("cannot write " + (root / "summary.csv").string());
    write_sweep_summary(summary, records);
    out << "wrote " << records.size() << " lambda points under " << root.string() << '\n';
    return kOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& config, const KeyValues& overrides,
             std::uint64_t seed, std::uint64_t samples, const std::string& out_path, std::ostream& out) {
    const auto rc = load_config(config, overrides, false);
    const auto params = load_checkpoint(checkpoint);
    const auto& arch = rc.train.arch;
    if (params.encoder.dims() != arch.encoder_dims() || params.decoder.dims() != arch.decoder_dims()) {
        throw FormatError("checkpoint shape encoder " + dims_string(params.encoder.dims()) + ", decoder " +
                          dims_string(params.decoder.dims()) + " does not match config encoder " +
                          dims_string(arch.encoder_dims()) + ", decoder " +
                          dims_string(arch.decoder_dims()));
    }
    const auto exported = export_constellation(params.encoder, rc.train.p_a);
    if (exported.degenerate) throw TrainingError("encoder maps every message to the origin");
    const auto report = evaluate_model(exported.constellation, params.decoder, rc.train.channel(),
                                       rc.train.harvester, samples ? samples : rc.train.eval_samples,
                                       seed);
    const std::filesystem::path dest =
        out_path.empty() ? std::filesystem::path(checkpoint).parent_path() / "eval.txt"
                         : std::filesystem::path(out_path);
    std::ofstream file(dest, std::ios::trunc);
    if (!file) throw FormatError("cannot write " + dest.string());
    write_eval_report(file, report);
    write_eval_report(out, report);
    return kOk;
}

int cmd_plot(const std::string& csv, const std::string& svg_path, int size, std::ostream& out) {
    std::ifstream in(csv);
    if (!in) throw FormatError("cannot open " + csv);
    const auto c = read_constellation_csv(in);
    const auto svg = render_constellation_svg(c, size, std::filesystem::path(csv).filename().string());
    std::ofstream file(svg_path, std::ios::trunc);
    if (!file) throw FormatError("cannot write " + svg_path);
    file << svg;
    out << "wrote " << svg_path << " (" << c.size() << " points)\n";
    return kOk;
}

int cmd_gradcheck(const std::string& config, const KeyValues& overrides, std::size_t cases,
                  bool corrupt, std::ostream& out) {
    const auto rc = load_config(config, overrides, false);
    const std::uint64_t seed = rc.train.seed;
    ModelAParams a;
    ModelBParams b;
    if (const auto* pa = std::get_if<ModelAParams>(&rc.train.harvester)) a = *pa;
    if (const auto* pb = std::get_if<ModelBParams>(&rc.train.harvester)) b = *pb;
    GradcheckOptions opt;
    opt.corrupt_gradient = corrupt;
    const auto start = std::chrono::steady_clock::now();
    const auto result = run_gradcheck_suite(a, b, rc.train.p_a, rc.train.channel().noise_variance,
                                            seed, cases, opt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& [label, report] : result.cases) {
        out << "case " << label << ": max rel error " << g(report.max_rel_error) << '\n';
        for (const auto& blk : report.blocks) {
            out << "    " << blk.name << "  worst " << g(blk.max_rel_error) << " at " << blk.worst_index
                << " (analytic " << g(blk.analytic) << ", numeric " << g(blk.numeric) << ")\n";
        }
    }
    out << "max relative error " << g(result.max_rel_error) << " over " << result.cases.size()
        << " cases in " << g(secs) << " s: " << (result.passed() ? "PASS" : "FAIL") << '\n';
    return result.passed() ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Learned SWIPT modulation: train, sweep, evaluate and plot"};
    app.require_subcommand(1);

    std::string config, checkpoint, csv, svg, out_path;
    std::vector<std::string> sets;
    bool paper = false;
    bool corrupt = false;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    std::size_t cases = 4;
    int size = 480;

    auto* train = app.add_subcommand("train", "best-of-restarts training at one lambda");
    train->add_option("config", config, "config file")->required();
    auto* train_lambda = train->add_option("--lambda", lambda, "power-demand weight");
    auto* train_seed = train->add_option("--seed", seed, "base seed");
    train->add_flag("--paper-scale", paper, "full-size training constants");
    train->add_option("--set", sets, "override a config key (key=value)");

    auto* sweep = app.add_subcommand("sweep", "lambda sweep until SER exceeds ser_max");
    sweep->add_option("config", config, "config file")->required();
    auto* sweep_seed = sweep->add_option("--seed", seed, "base seed");
    sweep->add_flag("--paper-scale", paper, "full-size training constants");
    sweep->add_option("--set", sets, "override a config key (key=value)");

    auto* eval = app.add_subcommand("eval", "Monte-Carlo SER and delivered power of a checkpoint");
    eval->add_option("checkpoint", checkpoint, "checkpoint file")->required();
    eval->add_option("config", config, "config file")->required();
    eval->add_option("--seed", seed, "evaluation seed");
    eval->add_option("--samples", samples, "test samples (default eval_samples)");
    eval->add_option("--out", out_path, "report path (default next to the checkpoint)");
    eval->add_option("--set", sets, "override a config key (key=value)");

    auto* plot = app.add_subcommand("plot", "SVG scatter plot of a constellation CSV");
    plot->add_option("csv", csv, "constellation CSV")->required();
    plot->add_option("svg", svg, "output SVG")->required();
    plot->add_option("--size", size, "pixels")->check(CLI::Range(100, 4000));

    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the full chain");
    gradcheck->add_option("config", config, "config file")->required();
    auto* gradcheck_seed = gradcheck->add_option("--seed", seed, "case seed (default: config seed)");
    gradcheck->add_option("--cases", cases, "cases per (model, lambda) setting")->check(CLI::PositiveNumber);
    gradcheck->add_flag("--corrupt-gradient", corrupt, "test hook: perturb one analytic entry");
    gradcheck->add_option("--set", sets, "override a config key (key=value)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        KeyValues overrides = parse_sets(sets);
        if (train->parsed()) {
            if (*train_lambda) overrides["lambda"] = g(lambda) == "0" ? "0" : std::to_string(lambda);
            if (*train_seed) overrides["seed"] = std::to_string(seed);
            return cmd_train(config, overrides, paper, out);
        }
        if (sweep->parsed()) {
            if (*sweep_seed) overrides["seed"] = std::to_string(seed);
            return cmd_sweep(config, overrides, paper, out);
        }
        if (eval->parsed()) return cmd_eval(checkpoint, config, overrides, seed, samples, out_path, out);
        if (plot->parsed()) return cmd_plot(csv, svg, size, out);
        if (gradcheck->parsed()) {
            if (*gradcheck_seed) overrides["seed"] = std::to_string(seed);
            return cmd_gradcheck(config, overrides, cases, corrupt, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << '\n';
        return kFormatError;
    } catch (const TrainingError& e) {
        err << "training failed: " << e.what() << '\n';
        return kTrainingError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFormatError;
    }
    return kConfigError;
}

}  // namespace swipt::cli
