#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "swipt/nn.hpp"

namespace swipt {

using Symbol = std::complex<double>;

// Messages are stored 0-based: index s in [0, M) is message s+1.
using Message = std::uint32_t;

// Learned (or classical) modulation: M points with message probabilities.
struct Constellation {
    std::vector<Symbol> points;
    std::vector<double> probabilities;

    static Constellation uniform(std::vector<Symbol> points);

    std::size_t size() const { return points.size(); }
    // Probability-weighted E[|x|^2].
    double mean_power() const;
};

std::vector<double> one_hot(Message s, std::size_t messages);

// Reusable buffers for per-sample network evaluation.
struct MlpWorkspace {
    std::vector<double> a;
    std::vector<double> b;
    explicit MlpWorkspace(const Mlp& net) : a(net.max_width()), b(net.max_width()) {}
};

// Encoder output for one message, before power normalization. The first
// layer's product with the one-hot input is a column selection.
Symbol encode_message(const Mlp& encoder, Message s, MlpWorkspace& ws);
std::vector<Symbol> encode(const Mlp& encoder, std::span<const Message> messages);

struct NormalizedBatch {
    std::vector<Symbol> symbols;
    double scale = 1.0;
    double energy = 0.0;   // sum |x_k|^2 of the input, after clamping
    bool degenerate = false;
};

inline constexpr double kNormEpsilon = 1e-20;

// Scales the batch so that its mean power is exactly p_a.
NormalizedBatch normalize_power(std::span<const Symbol> batch, double p_a);

void decode(const Mlp& decoder, Symbol y, MlpWorkspace& ws, std::span<double> probs);
std::vector<double> decode(const Mlp& decoder, Symbol y);

// Argmax, ties to the lowest index.
Message detect(std::span<const double> probs);

inline constexpr double kLogEpsilon = 1e-15;

// -sum s_i ln max(p_i, 1e-15).
double cross_entropy(std::span<const double> target, std::span<const double> probs);
double cross_entropy(Message s, std::span<const double> probs);

struct ExportedConstellation {
    Constellation constellation;
    bool degenerate = false;
};

// All M messages as one batch through encode + normalize_power.
ExportedConstellation export_constellation(const Mlp& encoder, double p_a);

// CSV with header `index,probability,real,imag`, 17 significant digits.
void write_constellation_csv(std::ostream& out, const Constellation& c);
// Throws FormatError naming the offending line.
Constellation read_constellation_csv(std::istream& in);

}  // namespace swipt
