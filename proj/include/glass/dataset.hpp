#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace glass {

enum class Label : int { Real = 0, Fake = 1 };
enum class Split { Unassigned, Train, Val, Test };

const char* to_string(Label label);
const char* to_string(Split split);
Label label_from_string(const std::string& s);
Split split_from_string(const std::string& s);

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

struct ManifestEntry {
  std::string path;
  Label label = Label::Real;
  Split split = Split::Unassigned;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::uint64_t seed = 0;
  SplitRatios ratios;

  std::vector<ManifestEntry> select(Split split) const;
};

// Stratified split: each class is shuffled by a fresh Rng(seed) and cut by
// largest-remainder rounding of count * ratio, so per-class split sizes are
// within one sample of the requested fractions. Every split gets at least one
// sample of every class. Classes of equal size receive the same
// permutation, so index-paired corpora keep each pair in one split. Entry
// order is preserved; only the split field changes.
DatasetManifest split_dataset(DatasetManifest manifest, const SplitRatios& ratios, std::uint64_t seed);

// Per-class split sizes produced by the rounding rule (train, val, test).
std::array<std::size_t, 3> stratified_counts(std::size_t class_count, const SplitRatios& ratios);

// Lists <root>/real/*.{png,ppm} and <root>/fake/*.{png,ppm}, sorted by path.
// Paths are stored relative to root.
DatasetManifest scan_dataset_dir(const std::filesystem::path& root);

nlohmann::json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace glass
