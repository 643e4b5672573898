#include "glass/config.hpp"

#include <set>

#include "glass/errors.hpp"

namespace glass {

void TrainConfig::validate() const {
  for (double v : {lr_global, lr_local, lr_head}) {
    if (!(v > 0)) throw ConfigError("learning rates must be positive");
  }
  for (double v : {wd_global, wd_local}) {
    if (!(v >= 0)) throw ConfigError("weight decay must be non-negative");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate <= 0.5)) throw ConfigError("dropout_rate must lie in [0, 0.5]");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (n_crops < 1) throw ConfigError("n_crops must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
}

TrainConfig vit_reference_preset() {
  TrainConfig c;
  c.lr_global = 1.58e-5;
  c.lr_local = 4.26e-5;
  c.lr_head = 6.48e-5;
  c.wd_global = 3.18e-5;
  c.wd_local = 6.14e-6;
  c.dropout_rate = 0.3;
  c.batch_size = 64;
  c.n_crops = 10;
  return c;
}

std::string ExperimentConfig::manifest_path() const {
  if (!manifest.empty()) return manifest;
  return data_dir.empty() ? std::string("manifest.json") : data_dir + "/manifest.json";
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"lr_global", c.train.lr_global},
          {"lr_local", c.train.lr_local},
          {"lr_head", c.train.lr_head},
          {"wd_global", c.train.wd_global},
          {"wd_local", c.train.wd_local},
          {"dropout_rate", c.train.dropout_rate},
          {"batch_size", c.train.batch_size},
          {"n_crops", c.train.n_crops},
          {"epochs", c.train.epochs},
          {"seed", c.train.seed},
          {"embed_dim", c.arch.embed_dim},
          {"attn_hidden", c.arch.attn_hidden},
          {"channels", c.arch.channels},
          {"global_only", c.arch.global_only},
          {"data_dir", c.data_dir},
          {"manifest", c.manifest},
          {"ece_bins", c.ece_bins},
          {"upscale_small", c.upscale_small}};
}

ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "lr_global", "lr_local",  "lr_head",     "wd_global",   "wd_local",    "dropout_rate",
      "batch_size", "n_crops",  "epochs",      "seed",        "embed_dim",   "attn_hidden",
      "channels",   "global_only", "data_dir", "manifest",    "ece_bins",    "upscale_small",
      "schema_version"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    auto& t = c.train;
    t.lr_global = j.value("lr_global", t.lr_global);
    t.lr_local = j.value("lr_local", t.lr_local);
    t.lr_head = j.value("lr_head", t.lr_head);
    t.wd_global = j.value("wd_global", t.wd_global);
    t.wd_local = j.value("wd_local", t.wd_local);
    t.dropout_rate = j.value("dropout_rate", t.dropout_rate);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.n_crops = j.value("n_crops", t.n_crops);
    t.epochs = j.value("epochs", t.epochs);
    t.seed = j.value("seed", t.seed);
    c.arch.embed_dim = j.value("embed_dim", c.arch.embed_dim);
    c.arch.attn_hidden = j.value("attn_hidden", c.arch.attn_hidden);
    c.arch.channels = j.value("channels", c.arch.channels);
    c.arch.global_only = j.value("global_only", c.arch.global_only);
    c.data_dir = j.value("data_dir", c.data_dir);
    c.manifest = j.value("manifest", c.manifest);
    c.ece_bins = j.value("ece_bins", c.ece_bins);
    c.upscale_small = j.value("upscale_small", c.upscale_small);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.train.validate();
  c.arch.validate();
  if (c.ece_bins < 1) throw ConfigError("ece_bins must be at least 1");
  return c;
}

void apply_overrides(nlohmann::json& config, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' is not key=value");
    const std::string key = o.substr(0, eq);
    const std::string value = o.substr(eq + 1);
    auto parsed = nlohmann::json::parse(value, nullptr, false);
    config[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
  }
}

}  // namespace glass
