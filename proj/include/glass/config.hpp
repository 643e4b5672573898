#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "glass/model.hpp"

namespace glass {

// Per-branch optimisation settings. Defaults are tuned for training the
// compact backbone from scratch on the synthetic corpus.
struct TrainConfig {
  double lr_global = 3e-3;
  double lr_local = 3e-3;
  double lr_head = 3e-3;
  double wd_global = 1e-4;
  double wd_local = 1e-4;
  double dropout_rate = 0.1;
  int batch_size = 8;
  int n_crops = 4;
  int epochs = 25;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Best GLASS ViT-Base/16 settings from the reference hyperparameter search,
// kept as a preset for the optimiser-group schema.
TrainConfig vit_reference_preset();

// Everything a train/eval/compare run needs: optimiser settings,
// architecture, data location.
struct ExperimentConfig {
  TrainConfig train;
  ArchConfig arch;
  std::string data_dir;
  std::string manifest;  // defaults to <data_dir>/manifest.json
  int ece_bins = 15;
  bool upscale_small = false;

  std::string manifest_path() const;
};

// Flat JSON object; unknown keys raise ConfigError.
nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig experiment_from_json(const nlohmann::json& j);

// Applies "key=value" overrides to a flat config object. Values are parsed as
// JSON when possible (numbers, booleans, arrays) and as strings otherwise.
void apply_overrides(nlohmann::json& config, const std::vector<std::string>& overrides);

}  // namespace glass
