#include "glass/checkpoint.hpp"

#include <bit>
#include <cstring>

#include <json.hpp>

#include "glass/errors.hpp"
#include "glass/io.hpp"

namespace glass {
namespace {

constexpr char kMagic[8] = {'G', 'L', 'A', 'S', 'S', 'C', 'K', '1'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

void put_f32(std::vector<std::uint8_t>& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

float get_f32(const std::uint8_t* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

nlohmann::json arch_to_json(const ArchConfig& a) {
  return {{"embed_dim", a.embed_dim}, {"attn_hidden", a.attn_hidden}, {"channels", a.channels},
          {"global_only", a.global_only}};
}

ArchConfig arch_from_json(const nlohmann::json& j) {
  ArchConfig a;
  a.embed_dim = j.at("embed_dim").get<int>();
  a.attn_hidden = j.at("attn_hidden").get<int>();
  a.channels = j.at("channels").get<std::vector<int>>();
  a.global_only = j.at("global_only").get<bool>();
  return a;
}

std::string describe(const ArchConfig& a) { return arch_to_json(a).dump(); }

}  // namespace

void save_checkpoint(const GlassParams<float>& model, const std::filesystem::path& path) {
  nlohmann::json tensors = nlohmann::json::array();
  std::vector<std::uint8_t> data;
  model.for_each([&](const std::string& name, ParamGroup, const std::vector<int>& shape, std::span<const float> v) {
    tensors.push_back({{"name", name}, {"shape", shape}, {"offset", data.size()}, {"count", v.size()}});
    for (float f : v) put_f32(data, f);
  });
  const nlohmann::json header = {{"schema_version", 1},  {"format", "glass-checkpoint"},
                                 {"arch", arch_to_json(model.arch)}, {"dtype", "float32"},
                                 {"data_bytes", data.size()}, {"tensors", std::move(tensors)}};
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(kMagic, kMagic + 8);
  put_u64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), data.begin(), data.end());
  write_bytes_atomic(path, out);
}

GlassParams<float> load_checkpoint(const std::filesystem::path& path, const std::optional<ArchConfig>& expected) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const IoError& e) {
    throw CheckpointError(e.what());
  }
  const std::string where = path.string() + ": ";
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw CheckpointError(where + "not a checkpoint (bad magic)");
  }
  const std::uint64_t header_len = get_u64(bytes.data() + 8);
  if (header_len > bytes.size() - 16) throw CheckpointError(where + "truncated header");

  nlohmann::json header;
  ArchConfig arch;
  std::uint64_t data_bytes = 0;
  try {
    header = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(header_len));
    if (header.at("dtype").get<std::string>() != "float32") throw CheckpointError(where + "unsupported dtype");
    arch = arch_from_json(header.at("arch"));
    arch.validate();
    data_bytes = header.at("data_bytes").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(where + "corrupt header: " + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(where + "invalid architecture: " + e.what());
  }
  if (expected && !(*expected == arch)) {
    throw CheckpointError(where + "architecture " + describe(arch) + " does not match expected " +
                          describe(*expected));
  }
  const std::uint64_t data_start = 16 + header_len;
  if (bytes.size() - data_start < data_bytes) throw CheckpointError(where + "truncated tensor data");

  auto model = GlassParams<float>::zeros(arch);
  const auto tensors = header.value("tensors", nlohmann::json::array());
  if (!tensors.is_array()) throw CheckpointError(where + "corrupt header: tensors is not a list");
  std::size_t index = 0;
  model.for_each([&](const std::string& name, ParamGroup, const std::vector<int>& shape, std::span<float> dst) {
    if (index >= tensors.size()) throw CheckpointError(where + "missing tensor " + name);
    const auto& t = tensors[index++];
    try {
      if (t.at("name").get<std::string>() != name) {
        throw CheckpointError(where + "expected tensor " + name + ", found " + t.at("name").get<std::string>());
      }
      if (t.at("shape").get<std::vector<int>>() != shape || t.at("count").get<std::uint64_t>() != dst.size()) {
        throw CheckpointError(where + "shape mismatch for " + name);
      }
      const auto offset = t.at("offset").get<std::uint64_t>();
      if (offset > data_bytes || data_bytes - offset < 4 * dst.size()) {
        throw CheckpointError(where + "tensor " + name + " runs past the data section");
      }
      const std::uint8_t* src = bytes.data() + data_start + offset;
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = get_f32(src + 4 * k);
    } catch (const nlohmann::json::exception& e) {
      throw CheckpointError(where + "corrupt tensor entry: " + e.what());
    }
  });
  if (index != tensors.size()) throw CheckpointError(where + "unexpected extra tensors");
  return model;
}

}  // namespace glass
