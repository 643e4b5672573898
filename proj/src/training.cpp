#include "glass/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <set>
#include <sstream>

#include "glass/errors.hpp"
#include "glass/optimizer.hpp"
#include "glass/synth.hpp"

namespace glass {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// ImageSet

void ImageSet::add(std::string name, int label, const ImageBuf& image) {
  if (label != 0 && label != 1) throw ConfigError("label must be 0 or 1");
  Item item;
  item.name = std::move(name);
  item.label = label;
  item.height = image.height;
  item.width = image.width;
  const ImageBuf q = quantize_8bit(image);
  if (q.data == image.data) {
    item.bytes.resize(image.data.size());
    for (std::size_t i = 0; i < image.data.size(); ++i) {
      item.bytes[i] = static_cast<std::uint8_t>(std::lround(image.data[i] * 255.0f));
    }
  } else {
    item.floats = image.data;
  }
  items_.push_back(std::move(item));
}

ImageSet ImageSet::from_manifest(const DatasetManifest& manifest, Split split, const std::filesystem::path& root,
                                 bool upscale_small) {
  const auto entries = manifest.select(split);
  std::vector<ImageBuf> images(entries.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(entries.size()); ++i) {
    try {
      ImageBuf img = decode_image(root / entries[i].path);
      if (upscale_small) img = upscale_to_min(img);
      require_min_size(img);
      images[i] = std::move(img);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  ImageSet set;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    set.add(entries[i].path, static_cast<int>(entries[i].label), images[i]);
  }
  return set;
}

ImageBuf ImageSet::image(std::size_t i) const {
  const Item& item = items_.at(i);
  ImageBuf img;
  img.height = item.height;
  img.width = item.width;
  if (!item.bytes.empty()) {
    img.data.resize(item.bytes.size());
    for (std::size_t k = 0; k < item.bytes.size(); ++k) {
      img.data[k] = static_cast<float>(item.bytes[k] / 255.0);
    }
  } else {
    img.data = item.floats;
  }
  return img;
}

// ---------------------------------------------------------------------------
// Training

int TrainHistory::total_steps() const {
  int total = 0;
  for (const auto& e : epochs) total += e.steps;
  return total;
}

std::string TrainHistory::to_csv() const {
  std::string out = "epoch,train_loss,val_loss,val_acc,epoch_seconds\n";
  for (const auto& e : epochs) {
    out += std::to_string(e.epoch) + "," + fmt(e.train_loss) + "," + fmt(e.val_loss) + "," + fmt(e.val_acc) + "," +
           fmt(e.epoch_seconds, "%.3f") + "\n";
  }
  return out;
}

TrainResult train(GlassParams<float> model, const ImageSet& train_set, const ImageSet& val_set,
                  const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  if (train_set.empty()) throw ConfigError("training set is empty");
  if (val_set.empty()) throw ConfigError("validation set is empty");

  AdamW optimizer = make_optimizer(config, model);
  const ForwardMode mode{true, config.dropout_rate};
  const std::size_t count = train_set.size();
  const auto batch = static_cast<std::size_t>(config.batch_size);

  TrainResult result;
  double best_acc = -1.0;
  double best_loss = 0.0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = Clock::now();
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(Rng::derive(config.seed, 1, epoch));
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    Rng batch_rng(Rng::derive(config.seed, 2, epoch));

    EpochRecord record;
    record.epoch = epoch;
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < count; begin += batch) {
      const std::size_t end = std::min(count, begin + batch);
      std::vector<ImageBuf> images(end - begin);
      std::vector<Example> examples(end - begin);
      for (std::size_t k = begin; k < end; ++k) {
        images[k - begin] = train_set.image(order[k]);
        examples[k - begin].label = train_set.label(order[k]);
      }
      for (std::size_t k = 0; k < images.size(); ++k) examples[k].image = &images[k];

      auto lg = loss_and_grads(model, std::span<const Example>(examples), config.n_crops, batch_rng, mode);
      if (!std::isfinite(lg.loss)) {
        throw DivergenceError("training loss became non-finite at epoch " + std::to_string(epoch) + ", step " +
                              std::to_string(record.steps + 1));
      }
      optimizer.step(model, lg.grads);
      loss_sum += lg.loss * static_cast<double>(end - begin);
      ++record.steps;
    }
    record.train_loss = loss_sum / static_cast<double>(count);

    const EvalResult val = evaluate(model, val_set, config.n_crops, Rng::derive(config.seed, 3), options.ece_bins);
    record.val_loss = val.report.loss;
    record.val_acc = val.report.accuracy;
    record.epoch_seconds = seconds_since(start);
    result.history.epochs.push_back(record);

    if (record.val_acc > best_acc || (record.val_acc == best_acc && record.val_loss < best_loss)) {
      best_acc = record.val_acc;
      best_loss = record.val_loss;
      result.best_model = model;
      result.best_epoch = epoch;
    }
    if (options.on_epoch) options.on_epoch(record);
  }
  result.final_model = std::move(model);
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation

nlohmann::json EvalResult::to_json() const {
  nlohmann::json images = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json rects = nlohmann::json::array();
    for (const auto& c : r.rects) rects.push_back({{"top", c.top}, {"left", c.left}, {"side", c.side}});
    images.push_back({{"path", r.path},
                      {"label", r.label},
                      {"prob_fake", r.prob_fake},
                      {"strategy", r.strategy},
                      {"rects", std::move(rects)},
                      {"attention_weights", r.attention_weights}});
  }
  return {{"schema_version", 1}, {"report", glass::to_json(report)}, {"images", std::move(images)}};
}

EvalResult evaluate(const GlassParams<float>& model, const ImageSet& set, int n_crops, std::uint64_t seed,
                    int ece_bins) {
  if (set.empty()) throw ConfigError("evaluation set is empty");
  if (n_crops < 1) throw ConfigError("n_crops must be at least 1");
  EvalResult out;
  out.records.resize(set.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(set.size()); ++i) {
    try {
      const ImageBuf img = set.image(i);
      Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(i)));
      const auto fwd = glass_forward(model, img, n_crops, rng, ForwardMode{});
      ImageRecord& r = out.records[i];
      r.path = set.name(i);
      r.label = set.label(i);
      r.prob_fake = fwd.probs[1];
      if (!model.arch.global_only) {
        r.strategy = std::string(strategy_name(fwd.plan.strategy));
        r.rects = fwd.rects;
        r.attention_weights.assign(fwd.attention_weights.begin(), fwd.attention_weights.end());
      }
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<int> labels(set.size());
  std::vector<double> probs(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    labels[i] = out.records[i].label;
    probs[i] = out.records[i].prob_fake;
  }
  out.report = compute_report(labels, probs, ece_bins);
  return out;
}

// ---------------------------------------------------------------------------
// Scaling probe

std::string ScalingReport::to_csv() const {
  std::string out = "n,seconds,activation_elements\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + fmt(r.seconds) + "," + std::to_string(r.activations) + "\n";
  }
  return out;
}

std::string ScalingReport::to_markdown() const {
  std::string out = "| n | seconds / probe epoch | activation elements |\n|---:|---:|---:|\n";
  for (const auto& r : rows) {
    out += "| " + std::to_string(r.n) + " | " + fmt(r.seconds, "%.3f") + " | " + std::to_string(r.activations) +
           " |\n";
  }
  out += "\n| fit | slope | intercept | R^2 |\n|---|---:|---:|---:|\n";
  out += "| time | " + fmt(time_fit.slope, "%.4g") + " | " + fmt(time_fit.intercept, "%.4g") + " | " +
         fmt(time_fit.r_squared, "%.3f") + " |\n";
  out += "| activations | " + fmt(activation_fit.slope, "%.6g") + " | " + fmt(activation_fit.intercept, "%.6g") +
         " | " + fmt(activation_fit.r_squared, "%.3f") + " |\n";
  return out;
}

nlohmann::json ScalingReport::to_json() const {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows) rs.push_back({{"n", r.n}, {"seconds", r.seconds}, {"activation_elements", r.activations}});
  auto fit = [](const LinearFit& f) {
    return nlohmann::json{{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
  };
  return {{"schema_version", 1},          {"batch_size", batch_size},
          {"probe_batches", probe_batches}, {"rows", std::move(rs)},
          {"time_fit", fit(time_fit)},      {"activation_fit", fit(activation_fit)}};
}

ScalingReport scaling_report(const ArchConfig& arch, const TrainConfig& config, const std::vector<int>& ns,
                             int probe_batches, const ScalingOptions& options) {
  arch.validate();
  config.validate();
  if (ns.size() < 2) throw ConfigError("scaling needs at least two n values");
  if (std::set<int>(ns.begin(), ns.end()).size() != ns.size()) throw ConfigError("n values must be distinct");
  for (int n : ns) {
    if (n < 1) throw ConfigError("n values must be positive");
  }
  if (probe_batches < 1) throw ConfigError("probe_batches must be at least 1");
  if (options.batch_size < 1 || options.repeats < 1) throw ConfigError("batch_size and repeats must be positive");
  if (options.image_size < kCropSide) throw DimensionError("probe images must be at least 224 pixels");

  std::vector<ImageBuf> images(options.batch_size);
  std::vector<Example> examples(options.batch_size);
  for (int i = 0; i < options.batch_size; ++i) {
    const auto label = i % 2 == 0 ? Label::Real : Label::Fake;
    images[i] = synth_image(label, Rng::derive(options.seed, 10, i), options.image_size, options.image_size).image;
    examples[i] = {&images[i], static_cast<int>(label)};
  }

  ScalingReport report;
  report.batch_size = options.batch_size;
  report.probe_batches = probe_batches;
  const ForwardMode mode{true, config.dropout_rate};
  for (int n : ns) {
    ScalingRow row;
    row.n = n;
    row.activations = activation_elements(arch, n, options.batch_size);
    double total = 0.0;
    for (int rep = 0; rep < options.repeats; ++rep) {
      auto model = init_params<float>(arch, options.seed);
      AdamW optimizer = make_optimizer(config, model);
      Rng rng(Rng::derive(options.seed, 20, n));
      const auto start = Clock::now();
      for (int b = 0; b < probe_batches; ++b) {
        auto lg = loss_and_grads(model, std::span<const Example>(examples), n, rng, mode);
        optimizer.step(model, lg.grads);
      }
      total += seconds_since(start);
    }
    row.seconds = total / options.repeats;
    report.rows.push_back(row);
  }

  std::vector<double> xs, ts, as;
  for (const auto& r : report.rows) {
    xs.push_back(r.n);
    ts.push_back(r.seconds);
    as.push_back(static_cast<double>(r.activations));
  }
  report.time_fit = linear_fit(xs, ts);
  report.activation_fit = linear_fit(xs, as);
  return report;
}

}  // namespace glass
