#include "swipt/transceiver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "swipt/errors.hpp"

namespace swipt {

Constellation Constellation::uniform(std::vector<Symbol> points) {
    Constellation c;
    const double p = 1.0 / static_cast<double>(points.size());
    c.probabilities.assign(points.size(), p);
    c.points = std::move(points);
    return c;
}

double Constellation::mean_power() const {
    double acc = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) acc += probabilities[k] * std::norm(points[k]);
    return acc;
}

std::vector<double> one_hot(Message s, std::size_t messages) {
    if (s >= messages) {
        throw ConfigError("one_hot: message " + std::to_string(s + 1) + " outside 1.." +
                          std::to_string(messages));
    }
    std::vector<double> v(messages, 0.0);
    v[s] = 1.0;
    return v;
}

Symbol encode_message(const Mlp& encoder, Message s, MlpWorkspace& ws) {
    const DenseLayer& first = encoder.layers.front();
    if (s >= first.in_dim) throw ConfigError("encode: message index out of range");
    std::span<double> cur(ws.a.data(), first.out_dim);
    for (std::size_t r = 0; r < first.out_dim; ++r) {
        const double v = first.weight(r, s) + first.biases[r];
        cur[r] = (first.activation == Activation::ReLU && v < 0.0) ? 0.0 : v;
    }
    double* spare = ws.b.data();
    for (std::size_t i = 1; i < encoder.layers.size(); ++i) {
        const DenseLayer& layer = encoder.layers[i];
        std::span<double> next(spare, layer.out_dim);
        dense_forward(layer, cur, next);
        spare = cur.data();
        cur = next;
    }
    return {cur[0], cur[1]};
}

std::vector<Symbol> encode(const Mlp& encoder, std::span<const Message> messages) {
    MlpWorkspace ws(encoder);
    std::vector<Symbol> out;
    out.reserve(messages.size());
    for (Message s : messages) out.push_back(encode_message(encoder, s, ws));
    return out;
}

NormalizedBatch normalize_power(std::span<const Symbol> batch, double p_a) {
    if (batch.empty()) throw ConfigError("normalize_power: empty batch");
    NormalizedBatch out;
    double energy = 0.0;
    for (const auto& x : batch) energy += std::norm(x);
    if (energy < kNormEpsilon) {
        energy = kNormEpsilon;
        out.degenerate = true;
    }
    out.energy = energy;
    out.scale = std::sqrt(p_a * static_cast<double>(batch.size()) / energy);
    out.symbols.reserve(batch.size());
    for (const auto& x : batch) out.symbols.push_back(x * out.scale);
    return out;
}

void decode(const Mlp& decoder, Symbol y, MlpWorkspace& ws, std::span<double> probs) {
    ws.a[0] = y.real();
    ws.a[1] = y.imag();
    std::span<double> cur(ws.a.data(), 2);
    double* spare = ws.b.data();
    for (const auto& layer : decoder.layers) {
        std::span<double> next(spare, layer.out_dim);
        dense_forward(layer, cur, next);
        spare = cur.data();
        cur = next;
    }
    std::copy(cur.begin(), cur.end(), probs.begin());
}

std::vector<double> decode(const Mlp& decoder, Symbol y) {
    MlpWorkspace ws(decoder);
    std::vector<double> probs(decoder.out_dim());
    decode(decoder, y, ws, probs);
    return probs;
}

Message detect(std::span<const double> probs) {
    if (probs.empty()) throw ConfigError("detect: empty probability vector");
    // max_element returns the first maximum.
    return static_cast<Message>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

double cross_entropy(std::span<const double> target, std::span<const double> probs) {
    if (target.size() != probs.size()) throw ConfigError("cross_entropy: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target[i] != 0.0) acc += target[i] * std::log(std::max(probs[i], kLogEpsilon));
    }
    return -acc + 0.0;
}

double cross_entropy(Message s, std::span<const double> probs) {
    return -std::log(std::max(probs[s], kLogEpsilon)) + 0.0;
}

ExportedConstellation export_constellation(const Mlp& encoder, double p_a) {
    const std::size_t messages = encoder.in_dim();
    std::vector<Message> all(messages);
    std::iota(all.begin(), all.end(), Message{0});
    auto normalized = normalize_power(encode(encoder, all), p_a);
    return {Constellation::uniform(std::move(normalized.symbols)), normalized.degenerate};
}

void write_constellation_csv(std::ostream& out, const Constellation& c) {
    out << "index,probability,real,imag\n";
    char buf[128];
    for (std::size_t k = 0; k < c.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", k, c.probabilities[k],
                      c.points[k].real(), c.points[k].imag());
        out << buf;
    }
}

namespace {

double parse_field(const std::string& text, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
        throw FormatError("constellation CSV line " + std::to_string(line) + ": bad number '" +
                          text + "'");
    }
    return v;
}

}  // namespace

Constellation read_constellation_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    Constellation c;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header) {
            if (line != "index,probability,real,imag") {
                throw FormatError("constellation CSV line " + std::to_string(line_no) +
                                  ": expected header 'index,probability,real,imag'");
            }
            have_header = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 4) {
            throw FormatError("constellation CSV line " + std::to_string(line_no) +
                              ": expected 4 fields, got " + std::to_string(fields.size()));
        }
        const double index = parse_field(fields[0], line_no);
        if (index != static_cast<double>(c.points.size())) {
            throw FormatError("constellation CSV line " + std::to_string(line_no) +
                              ": index out of sequence");
        }
        const double p = parse_field(fields[1], line_no);
        if (p < 0.0 || p > 1.0) {
            throw FormatError("constellation CSV line " + std::to_string(line_no) +
                              ": probability outside [0, 1]");
        }
        c.probabilities.push_back(p);
        c.points.emplace_back(parse_field(fields[2], line_no), parse_field(fields[3], line_no));
    }
    if (c.points.empty()) throw FormatError("constellation CSV has no rows");
    return c;
}

}  // namespace swipt
