#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "swipt/nn.hpp"

namespace swipt {

// Binary checkpoint, all integers and floats little-endian:
//   8 bytes   magic "SWIPTCKP"
//   u32       format version (1)
//   u32 n, then n x u32   encoder widths (M, hidden..., 2)
//   u32 n, then n x u32   decoder widths (2, hidden..., M)
//   per layer, encoder first: weights (out x in, row-major f64), biases (f64)
inline constexpr char kCheckpointMagic[8] = {'S', 'W', 'I', 'P', 'T', 'C', 'K', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const NetworkParams& params);
// Throws FormatError on bad magic, unknown version or truncation.
NetworkParams read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params);
NetworkParams load_checkpoint(const std::filesystem::path& path);

}  // namespace swipt
