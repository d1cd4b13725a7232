#include "swipt/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "swipt/errors.hpp"

namespace swipt {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

void get_bytes(std::istream& in, unsigned char* dst, std::size_t n) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw FormatError("checkpoint truncated");
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    get_bytes(in, b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    get_bytes(in, b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

void put_dims(std::ostream& out, const Mlp& net) {
    const auto dims = net.dims();
    put_u32(out, static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) put_u32(out, static_cast<std::uint32_t>(d));
}

std::vector<std::size_t> get_dims(std::istream& in) {
    const std::uint32_t n = get_u32(in);
    if (n < 2 || n > 64) throw FormatError("checkpoint: implausible layer count " + std::to_string(n));
    std::vector<std::size_t> dims(n);
    for (auto& d : dims) {
        d = get_u32(in);
        if (d == 0 || d > (1u << 20)) throw FormatError("checkpoint: implausible layer width");
    }
    return dims;
}

Mlp shape_mlp(const std::vector<std::size_t>& dims, Activation output) {
    Mlp net;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        net.layers.emplace_back(dims[i], dims[i + 1],
                                i + 2 == dims.size() ? output : Activation::ReLU);
    }
    return net;
}

}  // namespace

void write_checkpoint(std::ostream& out, const NetworkParams& params) {
    out.write(kCheckpointMagic, sizeof kCheckpointMagic);
    put_u32(out, kCheckpointVersion);
    put_dims(out, params.encoder);
    put_dims(out, params.decoder);
    for (const auto& block : param_blocks(params)) {
        for (double v : block.values) put_f64(out, v);
    }
}

NetworkParams read_checkpoint(std::istream& in) {
    char magic[sizeof kCheckpointMagic];
    in.read(magic, sizeof magic);
    if (in.gcount() != static_cast<std::streamsize>(sizeof magic) ||
        std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
        throw FormatError("not a checkpoint (bad magic)");
    }
    const std::uint32_t version = get_u32(in);
    if (version != kCheckpointVersion) {
        throw FormatError("unsupported checkpoint version " + std::to_string(version));
    }
    NetworkParams params;
    params.encoder = shape_mlp(get_dims(in), Activation::Linear);
    params.decoder = shape_mlp(get_dims(in), Activation::Softmax);
    for (auto& block : param_blocks(params)) {
        for (double& v : block.values) v = get_f64(in);
    }
    return params;
}

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write checkpoint " + path.string());
    write_checkpoint(out, params);
    if (!out) throw FormatError("error writing checkpoint " + path.string());
}

NetworkParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open checkpoint " + path.string());
    return read_checkpoint(in);
}

}  // namespace swipt
