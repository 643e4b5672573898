#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "glass/config.hpp"
#include "glass/dataset.hpp"
#include "glass/metrics.hpp"
#include "glass/model.hpp"

namespace glass {

// Labelled images for training or evaluation. Pixels that survive an 8-bit
// round trip (every decoded PNG) are held as bytes; anything else is kept
// as float.
class ImageSet {
 public:
  void add(std::string name, int label, const ImageBuf& image);

  // Decodes every entry of `split` relative to `root`. Undersized images
  // raise DimensionError unless `upscale_small` is set.
  static ImageSet from_manifest(const DatasetManifest& manifest, Split split, const std::filesystem::path& root,
                                bool upscale_small = false);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  int label(std::size_t i) const { return items_[i].label; }
  const std::string& name(std::size_t i) const { return items_[i].name; }
  ImageBuf image(std::size_t i) const;

 private:
  struct Item {
    std::string name;
    int label = 0;
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> bytes;  // channel-major, when exact
    std::vector<float> floats;        // otherwise
  };
  std::vector<Item> items_;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
  double epoch_seconds = 0.0;
  int steps = 0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  int total_steps() const;
  // epoch,train_loss,val_loss,val_acc,epoch_seconds
  std::string to_csv() const;
};

struct TrainResult {
  GlassParams<float> final_model;
  GlassParams<float> best_model;
  int best_epoch = 0;
  TrainHistory history;
};

struct TrainOptions {
  int ece_bins = 15;
  // Called after every epoch; for progress output.
  std::function<void(const EpochRecord&)> on_epoch;
};

// Epoch e shuffles with Rng(derive(seed, 1, e)) and draws per-batch example
// seeds from Rng(derive(seed, 2, e)); validation uses derive(seed, 3). The best
// model is the one with the highest validation accuracy, ties going to the
// lower validation loss. Throws DivergenceError on a non-finite batch loss.
TrainResult train(GlassParams<float> model, const ImageSet& train_set, const ImageSet& val_set,
                  const TrainConfig& config, const TrainOptions& options = {});

struct ImageRecord {
  std::string path;
  int label = 0;
  double prob_fake = 0.0;
  std::string strategy;
  std::vector<CropRect> rects;
  std::vector<double> attention_weights;
};

struct EvalResult {
  MetricsReport report;
  std::vector<ImageRecord> records;

  nlohmann::json to_json() const;  // report plus per-image records
};

// Eval-mode forward of image i with Rng(derive(seed, i)).
EvalResult evaluate(const GlassParams<float>& model, const ImageSet& set, int n_crops, std::uint64_t seed,
                    int ece_bins = 15);

struct ScalingRow {
  int n = 0;
  double seconds = 0.0;  // mean over repeats of one probe epoch
  std::int64_t activations = 0;
};

struct ScalingReport {
  int batch_size = 32;
  int probe_batches = 0;
  std::vector<ScalingRow> rows;
  LinearFit time_fit;
  LinearFit activation_fit;

  std::string to_csv() const;
  std::string to_markdown() const;
  nlohmann::json to_json() const;
};

struct ScalingOptions {
  int batch_size = 32;
  int image_size = 448;
  int repeats = 1;
  std::uint64_t seed = 0;
};

// Times probe epochs of `probe_batches` optimiser steps on synthetic images
// for each n, alongside the analytic activation count, and fits both against
// n. Needs at least two distinct n values.
ScalingReport scaling_report(const ArchConfig& arch, const TrainConfig& config, const std::vector<int>& ns,
                             int probe_batches, const ScalingOptions& options = {});

}  // namespace glass
