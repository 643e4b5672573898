#pragma once

#include <filesystem>
#include <optional>

#include "glass/model.hpp"

namespace glass {

// Layout:
//   bytes 0..7   "GLASSCK1"
//   bytes 8..15  header length L, uint64 little-endian
//   next L bytes JSON header: schema_version, arch {embed_dim, attn_hidden,
//                channels, global_only}, dtype "float32", data_bytes and
//                tensors [{name, shape, offset, count}] with byte offsets
//                relative to the start of the data section
//   data         little-endian IEEE-754 float32 arrays
void save_checkpoint(const GlassParams<float>& model, const std::filesystem::path& path);

// Throws CheckpointError on a corrupt or truncated file, and when the stored
// architecture differs from `expected` (if given) or the tensor table does not
// match the architecture it declares.
GlassParams<float> load_checkpoint(const std::filesystem::path& path,
                                   const std::optional<ArchConfig>& expected = std::nullopt);

}  // namespace glass
