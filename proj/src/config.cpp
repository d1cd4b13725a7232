#include "swipt/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "swipt/errors.hpp"

namespace swipt {

const std::vector<ConfigKey>& config_schema() {
    static const std::vector<ConfigKey> schema = {
        {"messages", "number of messages M (integer >= 2)"},
        {"p_a", "average power constraint P_a (> 0)"},
        {"snr", "linear signal-to-noise ratio P_a / sigma^2 (> 0)"},
        {"noise_variance", "total complex noise variance sigma^2 (>= 0); overrides snr"},
        {"harvester.model", "A (moment model) or B (sigmoid model); required"},
        {"harvester.alpha", "model A alpha (> 0); required for A"},
        {"harvester.beta", "model A beta (>= 0); required for A"},
        {"harvester.gamma", "model A gamma (finite); required for A"},
        {"harvester.ls", "model B saturation power L_s (> 0); required for B"},
        {"harvester.a", "model B steepness a (> 0); required for B"},
        {"harvester.b", "model B threshold b (> 0); required for B"},
        {"epochs", "training epochs (integer >= 1)"},
        {"minibatch_size", "samples per minibatch (integer >= 1, <= train_set_size)"},
        {"train_set_size", "samples per epoch (integer >= 1)"},
        {"learning_rate", "Adam learning rate (> 0)"},
        {"restarts", "initializations per lambda (integer >= 1)"},
        {"lambda", "lambda for the train command (>= 0)"},
        {"lambda.start", "first non-zero lambda of a sweep (> 0)"},
        {"lambda.factor", "geometric lambda step (> 1)"},
        {"lambda.max_points", "maximum sweep points including lambda = 0 (integer >= 1)"},
        {"ser_max", "sweep stops once SER exceeds this (0 < ser_max < 1)"},
        {"seed", "base seed (unsigned integer)"},
        {"encoder.hidden", "comma-separated encoder hidden widths (default 2M)"},
        {"decoder.hidden", "comma-separated decoder hidden widths (default 2M)"},
        {"eval_samples", "Monte-Carlo SER samples (integer >= 1000)"},
        {"cost_samples", "samples behind the reported final cost (integer >= 1)"},
        {"output_dir", "output root (default $SWIPT_OUTPUT_ROOT or ./runs)"},
        {"profile", "run profile name, letters/digits/-/_ (default desk or paper)"},
        {"plot.size", "SVG width and height in pixels (integer 100..4000)"},
    };
    return schema;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw ConfigError(key + ": " + why);
}

double as_real(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        bad(key, "expected a number, got '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) bad(key, "expected a finite number, got '" + text + "'");
    return v;
}

std::uint64_t as_count(const std::string& key, const std::string& text) {
    if (text.empty() || !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
        bad(key, "expected a non-negative integer, got '" + text + "'");
    }
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        bad(key, "integer out of range: '" + text + "'");
    }
}

std::vector<std::size_t> as_widths(const std::string& key, const std::string& text) {
    std::vector<std::size_t> widths;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto w = as_count(key, trim(item));
        if (w == 0 || w > 4096) bad(key, "layer width must be in 1..4096");
        widths.push_back(static_cast<std::size_t>(w));
    }
    if (widths.empty()) bad(key, "expected at least one width");
    return widths;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (!kv.emplace(key, value).second) bad(key, "set twice (line " + std::to_string(line_no) + ")");
    }
    return kv;
}

RunConfig build_config(const KeyValues& file, const KeyValues& overrides, bool paper_scale) {
    KeyValues kv = file;
    for (const auto& [k, v] : overrides) kv[k] = v;
    if (paper_scale) {
        // Full-scale constants sit between the file and explicit overrides.
        std::size_t m = 16;
        if (auto it = kv.find("messages"); it != kv.end()) {
            m = static_cast<std::size_t>(std::max<std::uint64_t>(as_count("messages", it->second), 2));
        }
        const TrainConfig p = TrainConfig::paper(m);
        const KeyValues layer = {
            {"epochs", std::to_string(p.epochs)},
            {"restarts", std::to_string(p.restarts)},
            {"minibatch_size", std::to_string(p.minibatch_size)},
            {"train_set_size", std::to_string(p.train_set_size)},
            {"eval_samples", std::to_string(p.eval_samples)},
            {"profile", "paper"},
        };
        for (const auto& [k, v] : layer) {
            if (!overrides.contains(k)) kv[k] = v;
        }
    }

    std::set<std::string> known;
    for (const auto& key : config_schema()) known.insert(key.name);
    for (const auto& [k, v] : kv) {
        if (!known.contains(k)) bad(k, "unknown key");
    }
    auto get = [&kv](const std::string& key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    std::size_t messages = 16;
    if (const auto* v = get("messages")) {
        const auto m = as_count("messages", *v);
        if (m < 2 || m > 1024) bad("messages", "must be in 2..1024");
        messages = static_cast<std::size_t>(m);
    }

    RunConfig rc;
    TrainConfig& t = rc.train;
    t = TrainConfig::desk(messages);
    rc.profile = "desk";

    if (const auto* v = get("p_a")) t.p_a = as_real("p_a", *v);
    if (const auto* v = get("snr")) t.snr = as_real("snr", *v);
    if (const auto* v = get("noise_variance")) t.noise_variance = as_real("noise_variance", *v);

    const auto* model = get("harvester.model");
    if (model == nullptr) bad("harvester.model", "missing (A or B)");
    auto required = [&](const std::string& key) {
        const auto* v = get(key);
        if (v == nullptr) bad(key, "missing (required for harvester model " + *model + ")");
        return as_real(key, *v);
    };
    if (*model == "A") {
        ModelAParams a;
        a.alpha = required("harvester.alpha");
        a.beta = required("harvester.beta");
        a.gamma = required("harvester.gamma");
        for (const char* k : {"harvester.ls", "harvester.a", "harvester.b"}) {
            if (get(k)) bad(k, "only valid for harvester model B");
        }
        t.harvester = a;
    } else if (*model == "B") {
        ModelBParams b;
        b.ls = required("harvester.ls");
        b.a = required("harvester.a");
        b.b = required("harvester.b");
        for (const char* k : {"harvester.alpha", "harvester.beta", "harvester.gamma"}) {
            if (get(k)) bad(k, "only valid for harvester model A");
        }
        t.harvester = b;
    } else {
        bad("harvester.model", "expected A or B, got '" + *model + "'");
    }

    auto count_key = [&](const std::string& key, auto& field) {
        if (const auto* v = get(key)) field = static_cast<std::remove_reference_t<decltype(field)>>(as_count(key, *v));
    };
    count_key("epochs", t.epochs);
    count_key("minibatch_size", t.minibatch_size);
    count_key("train_set_size", t.train_set_size);
    count_key("restarts", t.restarts);
    count_key("lambda.max_points", t.lambda.max_points);
    count_key("seed", t.seed);
    count_key("eval_samples", t.eval_samples);
    count_key("cost_samples", t.cost_samples);
    if (const auto* v = get("learning_rate")) t.learning_rate = as_real("learning_rate", *v);
    if (const auto* v = get("lambda.start")) t.lambda.start = as_real("lambda.start", *v);
    if (const auto* v = get("lambda.factor")) t.lambda.factor = as_real("lambda.factor", *v);
    if (const auto* v = get("ser_max")) t.ser_max = as_real("ser_max", *v);
    if (const auto* v = get("lambda")) {
        const double l = as_real("lambda", *v);
        if (l < 0.0) bad("lambda", "must be non-negative");
        rc.lambda = l;
    }
    if (const auto* v = get("encoder.hidden")) t.arch.encoder_hidden = as_widths("encoder.hidden", *v);
    if (const auto* v = get("decoder.hidden")) t.arch.decoder_hidden = as_widths("decoder.hidden", *v);

    if (const char* env = std::getenv(kOutputRootEnv); env != nullptr && *env != '\0') {
        rc.output_dir = env;
    }
    if (const auto* v = get("output_dir")) {
        if (v->empty()) bad("output_dir", "must not be empty");
        rc.output_dir = *v;
    }
    if (const auto* v = get("profile")) {
        const bool ok = !v->empty() && std::all_of(v->begin(), v->end(), [](unsigned char c) {
            return std::isalnum(c) || c == '-' || c == '_';
        });
        if (!ok) bad("profile", "use letters, digits, '-' or '_'");
        rc.profile = *v;
    }
    if (const auto* v = get("plot.size")) {
        const auto px = as_count("plot.size", *v);
        if (px < 100 || px > 4000) bad("plot.size", "must be in 100..4000");
        rc.plot.size_px = static_cast<int>(px);
    }

    t.validate();
    return rc;
}

RunConfig load_config(const std::filesystem::path& path, const KeyValues& overrides,
                      bool paper_scale) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config " + path.string());
    return build_config(parse_key_values(in), overrides, paper_scale);
}

}  // namespace swipt
