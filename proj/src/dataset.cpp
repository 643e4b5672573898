#include "glass/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "glass/errors.hpp"
#include "glass/io.hpp"
#include "glass/rng.hpp"

namespace glass {

const char* to_string(Label label) { return label == Label::Real ? "real" : "fake"; }

const char* to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    case Split::Unassigned: break;
  }
  return "unassigned";
}

Label label_from_string(const std::string& s) {
  if (s == "real") return Label::Real;
  if (s == "fake") return Label::Fake;
  throw ConfigError("unknown label '" + s + "'");
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  if (s == "unassigned") return Split::Unassigned;
  throw ConfigError("unknown split '" + s + "'");
}

std::vector<ManifestEntry> DatasetManifest::select(Split split) const {
  std::vector<ManifestEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [split](const ManifestEntry& e) { return e.split == split; });
  return out;
}

std::array<std::size_t, 3> stratified_counts(std::size_t class_count, const SplitRatios& ratios) {
  const std::array<double, 3> r = {ratios.train, ratios.val, ratios.test};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    const double exact = static_cast<double>(class_count) * r[k];
    const double fl = std::floor(exact + 1e-9);
    counts[k] = static_cast<std::size_t>(fl);
    frac[k] = exact - fl;
    assigned += counts[k];
  }
  // Largest remainder; ties go to the earlier split.
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b] + 1e-12; });
  for (std::size_t i = 0; assigned < class_count; ++i, ++assigned) counts[order[i % 3]] += 1;

  for (int k = 0; k < 3; ++k) {
    if (counts[k] == 0) {
      auto largest = std::max_element(counts.begin(), counts.end());
      --*largest;
      counts[k] = 1;
    }
  }
  return counts;
}

DatasetManifest split_dataset(DatasetManifest manifest, const SplitRatios& ratios, std::uint64_t seed) {
  if (manifest.entries.empty()) throw ConfigError("cannot split an empty manifest");
  if (!(ratios.train > 0 && ratios.val > 0 && ratios.test > 0)) {
    throw ConfigError("split ratios must all be positive");
  }
  if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }

  for (Label label : {Label::Real, Label::Fake}) {
    Rng rng(seed);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
      if (manifest.entries[i].label == label) idx.push_back(i);
    }
    if (idx.empty()) continue;
    if (idx.size() < 3) {
      throw ConfigError(std::string("class '") + to_string(label) + "' has " + std::to_string(idx.size()) +
                        " samples; at least 3 are needed for three splits");
    }
    rng.shuffle(std::span<std::size_t>(idx));
    const auto counts = stratified_counts(idx.size(), ratios);
    std::size_t pos = 0;
    const std::array<Split, 3> splits = {Split::Train, Split::Val, Split::Test};
    for (int k = 0; k < 3; ++k) {
      for (std::size_t c = 0; c < counts[k]; ++c) manifest.entries[idx[pos++]].split = splits[k];
    }
  }
  manifest.seed = seed;
  manifest.ratios = ratios;
  return manifest;
}

DatasetManifest scan_dataset_dir(const std::filesystem::path& root) {
  DatasetManifest manifest;
  for (Label label : {Label::Real, Label::Fake}) {
    const auto dir = root / to_string(label);
    if (!std::filesystem::is_directory(dir)) continue;
    std::vector<std::string> files;
    for (const auto& de : std::filesystem::directory_iterator(dir)) {
      if (!de.is_regular_file()) continue;
      const auto ext = de.path().extension().string();
      if (ext == ".png" || ext == ".ppm") {
        files.push_back(std::filesystem::relative(de.path(), root).generic_string());
      }
    }
    std::sort(files.begin(), files.end());
    for (auto& f : files) manifest.entries.push_back({std::move(f), label, Split::Unassigned});
  }
  if (manifest.entries.empty()) throw IoError("no images found under " + root.string() + "/{real,fake}");
  return manifest;
}

nlohmann::json manifest_to_json(const DatasetManifest& manifest) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"path", e.path}, {"label", to_string(e.label)}, {"split", to_string(e.split)}});
  }
  return {{"schema_version", 1},
          {"entries", std::move(entries)},
          {"seed", manifest.seed},
          {"ratios", {manifest.ratios.train, manifest.ratios.val, manifest.ratios.test}}};
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  DatasetManifest m;
  try {
    for (const auto& e : j.at("entries")) {
      m.entries.push_back({e.at("path").get<std::string>(), label_from_string(e.at("label").get<std::string>()),
                           split_from_string(e.value("split", std::string("unassigned")))});
    }
    m.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("ratios")) {
      const auto& r = j.at("ratios");
      m.ratios = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  write_text_atomic(path, manifest_to_json(manifest).dump(2) + "\n");
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

}  // namespace glass
