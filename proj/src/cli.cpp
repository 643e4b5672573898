#include "glass/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "glass/checkpoint.hpp"
#include "glass/config.hpp"
#include "glass/coverage.hpp"
#include "glass/dataset.hpp"
#include "glass/errors.hpp"
#include "glass/io.hpp"
#include "glass/metrics.hpp"
#include "glass/sampler.hpp"
#include "glass/synth.hpp"
#include "glass/training.hpp"

namespace glass::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out_dir;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_out) {
  cmd->add_option("--seed", c.seed, "Random seed (default: $GLASS_SEED, else 0)");
  cmd->add_option("--threads", c.threads, "Worker threads; 1 forces the single-threaded mode")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out-dir", c.out_dir, "Output directory (default: " + default_out + ")");
  cmd->final_callback([&c, default_out] {
    if (c.out_dir.empty()) c.out_dir = default_out;
  });
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("GLASS_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long s = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return s;
  } catch (const std::exception&) {
    throw ConfigError(std::string("GLASS_SEED is not an unsigned integer: ") + v);
  }
}

// Explicit --seed, else GLASS_SEED, else `fallback`.
std::uint64_t resolve_seed(const Common& c, std::uint64_t fallback = 0) {
  if (c.seed) return *c.seed;
  if (auto s = env_seed()) return *s;
  return fallback;
}

void write_json(const fs::path& path, const json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

void write_run_json(const Common& c, const std::string& command, json resolved) {
  json run = {{"schema_version", 1}, {"command", command}, {"threads", c.threads}};
  for (auto& [k, v] : resolved.items()) run[k] = v;
  write_json(fs::path(c.out_dir) / "run.json", run);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Experiment configuration shared by train / eval / compare

struct ExperimentArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string data_dir;
  std::optional<int> epochs;
  std::optional<int> n_crops;
  bool global_only = false;
  bool upscale_small = false;
};

void add_experiment(CLI::App* cmd, ExperimentArgs& a) {
  cmd->add_option("--config", a.config_path, "JSON config (a run.json from a previous run also works)");
  cmd->add_option("--set", a.overrides, "Config override key=value (repeatable)");
  cmd->add_option("--data-dir", a.data_dir, "Corpus directory holding manifest.json");
  cmd->add_option("--epochs", a.epochs, "Training epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--n-crops", a.n_crops, "Local crops per image")->check(CLI::PositiveNumber);
  cmd->add_flag("--upscale-small", a.upscale_small, "Upscale images below 224 pixels instead of rejecting them");
}

// Precedence: config file < --set overrides < dedicated flags < --seed.
ExperimentConfig resolve_experiment(const ExperimentArgs& a, const Common& c) {
  json j = json::object();
  if (!a.config_path.empty()) {
    try {
      j = json::parse(read_file_text(a.config_path));
    } catch (const json::exception& e) {
      throw ConfigError(a.config_path + ": " + e.what());
    }
    if (j.is_object() && j.contains("config")) j = j.at("config");
  }
  apply_overrides(j, a.overrides);
  if (!a.data_dir.empty()) j["data_dir"] = a.data_dir;
  if (a.epochs) j["epochs"] = *a.epochs;
  if (a.n_crops) j["n_crops"] = *a.n_crops;
  if (a.global_only) j["global_only"] = true;
  if (a.upscale_small) j["upscale_small"] = true;
  const std::uint64_t fallback = j.is_object() && j.contains("seed") && j["seed"].is_number_unsigned()
                                     ? j["seed"].get<std::uint64_t>()
                                     : 0;
  j["seed"] = resolve_seed(c, fallback);
  auto cfg = experiment_from_json(j);
  if (cfg.data_dir.empty()) throw ConfigError("no data directory given (--data-dir or data_dir in the config)");
  return cfg;
}

DatasetManifest load_manifest(const ExperimentConfig& cfg) {
  if (!fs::is_directory(cfg.data_dir)) throw IoError("data directory " + cfg.data_dir + " does not exist");
  return read_manifest(cfg.manifest_path());
}

ImageSet load_split(const DatasetManifest& m, Split split, const ExperimentConfig& cfg) {
  auto set = ImageSet::from_manifest(m, split, cfg.data_dir, cfg.upscale_small);
  if (set.empty()) throw ConfigError(std::string("manifest has no ") + to_string(split) + " entries");
  return set;
}

void save_validated(const GlassParams<float>& model, const fs::path& path) {
  save_checkpoint(model, path);
  load_checkpoint(path, model.arch);
}

std::string report_row(const std::string& name, const MetricsReport& r) {
  return "| " + name + " | " + fixed(r.accuracy, 4) + " | " + fixed(r.precision, 4) + " | " + fixed(r.recall, 4) +
         " | " + fixed(r.f1, 4) + " | " + fixed(r.auc, 4) + " | " + fixed(r.ece, 4) + " | " + fixed(r.loss, 4) +
         " |\n";
}

const char* kReportHeader =
    "| model | accuracy | precision | recall | f1 | auc | ece | loss |\n|---|---:|---:|---:|---:|---:|---:|---:|\n";

std::string report_csv_row(const std::string& name, const MetricsReport& r) {
  return name + "," + fixed(r.accuracy, 6) + "," + fixed(r.precision, 6) + "," + fixed(r.recall, 6) + "," +
         fixed(r.f1, 6) + "," + fixed(r.auc, 6) + "," + fixed(r.ece, 6) + "," + fixed(r.loss, 6) + "\n";
}

struct TrainOutcome {
  TrainResult result;
  double seconds = 0.0;
};

TrainOutcome run_training(const ExperimentConfig& cfg, const ImageSet& train_set, const ImageSet& val_set,
                          const fs::path& dir, const std::string& tag, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  TrainOptions opts;
  opts.ece_bins = cfg.ece_bins;
  opts.on_epoch = [&](const EpochRecord& e) {
    out << tag << "epoch " << e.epoch << "/" << cfg.train.epochs << "  train_loss " << fixed(e.train_loss, 4)
        << "  val_loss " << fixed(e.val_loss, 4) << "  val_acc " << fixed(e.val_acc, 4) << "  ("
        << fixed(e.epoch_seconds, 1) << " s)\n";
    out.flush();
  };
  TrainOutcome o;
  o.result = train(init_params<float>(cfg.arch, cfg.train.seed), train_set, val_set, cfg.train, opts);
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fs::create_directories(dir);
  save_validated(o.result.final_model, dir / "final.ckpt");
  save_validated(o.result.best_model, dir / "best.ckpt");
  write_text_atomic(dir / "history.csv", o.result.history.to_csv());
  return o;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_coverage(const Common& c, int height, int width, int crops, int mc_trials, bool approx, std::ostream& out) {
  const std::uint64_t seed = resolve_seed(c);
  const CoverageQuery q{height, width, kCropSide, crops};
  const auto exact = expected_coverage_exact(q);
  json result = {{"schema_version", 1},
                 {"height", height},
                 {"width", width},
                 {"n", crops},
                 {"strategy", std::string(strategy_name(exact.strategy))},
                 {"exact_percent", exact.percent}};
  out << format_percent(exact.percent) << " " << strategy_name(exact.strategy) << "\n";
  if (approx) {
    const auto a = expected_coverage_approx(q);
    result["approx_percent"] = a.percent;
    out << "approx " << format_percent(a.percent) << "\n";
  }
  if (mc_trials > 0) {
    const auto mc = mc_coverage(q, mc_trials, seed);
    result["mc_percent"] = mc.percent;
    result["mc_stderr"] = mc.std_error;
    result["mc_trials"] = mc.trials;
    out << "mc " << fixed(mc.percent, 2) << " +/- " << fixed(mc.std_error, 2) << " (" << mc.trials << " trials)\n";
  }
  write_json(fs::path(c.out_dir) / "coverage.json", result);
  write_run_json(c, "coverage",
                 {{"height", height}, {"width", width}, {"crops", crops}, {"mc_trials", mc_trials},
                  {"approx", approx}, {"seed", seed}});
  return 0;
}

int cmd_coverage_table(const Common& c, int mc_trials, std::ostream& out) {
  CoverageTableOptions opts;
  opts.mc_trials = mc_trials;
  opts.seed = resolve_seed(c);
  const auto table = coverage_table(reference_table_sizes(), reference_table_ns(), opts);
  write_text_atomic(fs::path(c.out_dir) / "coverage_table.csv", table.to_csv());
  const std::string md = table.to_markdown();
  write_text_atomic(fs::path(c.out_dir) / "coverage_table.md", md);
  write_run_json(c, "coverage-table", {{"mc_trials", mc_trials}, {"seed", opts.seed}});
  out << md;
  return 0;
}

int cmd_sample(const Common& c, const std::string& image_path, int crops, bool upscale_small, std::ostream& out) {
  const std::uint64_t seed = resolve_seed(c);
  ImageBuf img = decode_image(image_path);
  if (upscale_small) img = upscale_to_min(img);
  require_min_size(img);
  Rng rng(seed);
  const auto sample = sample_crops(img, crops, rng);
  json rects = json::array();
  for (const auto& r : sample.rects) rects.push_back({{"top", r.top}, {"left", r.left}, {"side", r.side}});
  const fs::path dir(c.out_dir);
  for (std::size_t i = 0; i < sample.crops.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "crop_%03zu.png", i);
    write_png(sample.crops[i], dir / name);
  }
  write_json(dir / "rects.json", {{"schema_version", 1},
                                  {"height", img.height},
                                  {"width", img.width},
                                  {"n", crops},
                                  {"strategy", std::string(strategy_name(sample.plan.strategy))},
                                  {"grid_size", sample.plan.grid_size},
                                  {"rects", rects}});
  write_run_json(c, "sample",
                 {{"image", image_path}, {"crops", crops}, {"upscale_small", upscale_small}, {"seed", seed}});
  out << "strategy " << strategy_name(sample.plan.strategy) << ", grid size " << sample.plan.grid_size << "\n";
  return 0;
}

struct SynthArgs {
  int count = 250;
  int size = 448;
  std::optional<int> height;
  std::optional<int> width;
  std::vector<double> ratios = {0.70, 0.15, 0.15};
  SynthParams params;
};

int cmd_synth(const Common& c, const SynthArgs& a, std::ostream& out) {
  const std::uint64_t seed = resolve_seed(c);
  if (a.ratios.size() != 3) throw ConfigError("--ratios needs three values");
  const int h = a.height.value_or(a.size);
  const int w = a.width.value_or(a.size);
  const SplitRatios ratios{a.ratios[0], a.ratios[1], a.ratios[2]};
  const auto manifest = synth_corpus(a.count, h, w, seed, c.out_dir, a.params, ratios);
  const auto& p = a.params;
  write_run_json(c, "synth",
                 {{"count", a.count},
                  {"height", h},
                  {"width", w},
                  {"ratios", a.ratios},
                  {"seed", seed},
                  {"patch_size", p.patch_size},
                  {"period", p.period},
                  {"amplitude", p.amplitude},
                  {"patch_count", p.patch_count}});
  out << "wrote " << manifest.entries.size() << " images to " << c.out_dir << "\n";
  return 0;
}

int cmd_train(const Common& c, const ExperimentArgs& a, std::ostream& out) {
  const auto cfg = resolve_experiment(a, c);
  const auto manifest = load_manifest(cfg);
  const auto train_set = load_split(manifest, Split::Train, cfg);
  const auto val_set = load_split(manifest, Split::Val, cfg);
  const auto o = run_training(cfg, train_set, val_set, c.out_dir, "", out);
  write_run_json(c, "train", {{"config", to_json(cfg)}});
  out << "best epoch " << o.result.best_epoch << ", " << fixed(o.seconds, 1) << " s\n";
  return 0;
}

int cmd_eval(const Common& c, const ExperimentArgs& a, const std::string& checkpoint, const std::string& split_name,
             std::ostream& out) {
  auto cfg = resolve_experiment(a, c);
  const auto model = load_checkpoint(checkpoint);
  cfg.arch = model.arch;
  const Split split = split_from_string(split_name);
  const auto manifest = load_manifest(cfg);
  const auto set = load_split(manifest, split, cfg);
  const auto result = evaluate(model, set, cfg.train.n_crops, cfg.train.seed, cfg.ece_bins);
  const fs::path dir(c.out_dir);
  json metrics = to_json(result.report);
  metrics["schema_version"] = 1;
  write_json(dir / "metrics.json", metrics);
  write_json(dir / "predictions.json", result.to_json());
  write_run_json(c, "eval", {{"config", to_json(cfg)}, {"checkpoint", checkpoint}, {"split", split_name}});
  out << kReportHeader << report_row(model.arch.global_only ? "global-only" : "glass", result.report);
  return 0;
}

int cmd_compare(const Common& c, const ExperimentArgs& a, std::ostream& out) {
  const auto cfg = resolve_experiment(a, c);
  const auto manifest = load_manifest(cfg);
  const auto train_set = load_split(manifest, Split::Train, cfg);
  const auto val_set = load_split(manifest, Split::Val, cfg);
  const auto test_set = load_split(manifest, Split::Test, cfg);

  ExperimentConfig glass_cfg = cfg;
  glass_cfg.arch.global_only = false;
  ExperimentConfig base_cfg = cfg;
  base_cfg.arch.global_only = true;

  const fs::path dir(c.out_dir);
  const auto g = run_training(glass_cfg, train_set, val_set, dir / "glass", "[glass] ", out);
  const auto b = run_training(base_cfg, train_set, val_set, dir / "global_only", "[global-only] ", out);
  const auto ge = evaluate(g.result.best_model, test_set, cfg.train.n_crops, cfg.train.seed, cfg.ece_bins);
  const auto be = evaluate(b.result.best_model, test_set, cfg.train.n_crops, cfg.train.seed, cfg.ece_bins);
  write_json(dir / "glass" / "predictions.json", ge.to_json());
  write_json(dir / "global_only" / "predictions.json", be.to_json());

  const std::string csv = "model,accuracy,precision,recall,f1,auc,ece,loss\n" + report_csv_row("glass", ge.report) +
                          report_csv_row("global-only", be.report);
  const std::string md = std::string(kReportHeader) + report_row("glass", ge.report) +
                         report_row("global-only", be.report) + "\naccuracy gain: " +
                         fixed(100.0 * (ge.report.accuracy - be.report.accuracy), 2) + " points\n";
  write_text_atomic(dir / "compare.csv", csv);
  write_text_atomic(dir / "compare.md", md);
  write_json(dir / "compare.json", {{"schema_version", 1},
                                    {"glass", to_json(ge.report)},
                                    {"global_only", to_json(be.report)},
                                    {"epochs", cfg.train.epochs},
                                    {"seed", cfg.train.seed},
                                    {"glass_best_epoch", g.result.best_epoch},
                                    {"global_only_best_epoch", b.result.best_epoch}});
  write_run_json(c, "compare", {{"config", to_json(cfg)}});
  out << md << "training time: " << fixed(g.seconds + b.seconds, 1) << " s\n";
  return 0;
}

struct ScalingArgs {
  std::vector<int> ns = {1, 2, 4, 8, 16};
  int probe_batches = 1;
  int batch_size = 32;
  int image_size = 448;
  int repeats = 1;
};

int cmd_scaling(const Common& c, const ExperimentArgs& e, const ScalingArgs& a, std::ostream& out) {
  json j = json::object();
  if (!e.config_path.empty()) {
    j = json::parse(read_file_text(e.config_path), nullptr, false);
    if (j.is_discarded()) throw ConfigError(e.config_path + ": not valid JSON");
    if (j.is_object() && j.contains("config")) j = j.at("config");
  }
  apply_overrides(j, e.overrides);
  j["seed"] = resolve_seed(c);
  const auto cfg = experiment_from_json(j);
  ScalingOptions opts;
  opts.batch_size = a.batch_size;
  opts.image_size = a.image_size;
  opts.repeats = a.repeats;
  opts.seed = cfg.train.seed;
  const auto report = scaling_report(cfg.arch, cfg.train, a.ns, a.probe_batches, opts);
  const fs::path dir(c.out_dir);
  write_text_atomic(dir / "scaling.csv", report.to_csv());
  write_text_atomic(dir / "scaling.md", report.to_markdown());
  write_json(dir / "scaling.json", report.to_json());
  write_run_json(c, "scaling",
                 {{"config", to_json(cfg)},
                  {"ns", a.ns},
                  {"probe_batches", a.probe_batches},
                  {"batch_size", a.batch_size},
                  {"image_size", a.image_size},
                  {"repeats", a.repeats}});
  out << report.to_markdown();
  return 0;
}

int cmd_weights(const Common& c, const std::string& checkpoint, int bins, std::ostream& out) {
  const auto model = load_checkpoint(checkpoint);
  if (model.arch.global_only) throw ConfigError("weights needs a two-stream checkpoint, not a global-only one");
  const auto dist = weight_distribution(model.classifier, model.arch.embed_dim, bins);
  const fs::path dir(c.out_dir);
  write_text_atomic(dir / "weights_summary.csv", dist.summary_csv());
  write_text_atomic(dir / "weights_histogram.csv", dist.histogram_csv());
  write_run_json(c, "weights", {{"checkpoint", checkpoint}, {"bins", bins}});
  out << dist.summary_csv();
  return 0;
}

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Global/local crop-attention detector toolkit", "glass"};
  app.require_subcommand(1);

  Common common;

  auto* coverage = app.add_subcommand("coverage", "Expected coverage of n sampled crops");
  int cov_h = 0, cov_w = 0, cov_n = 0, mc_trials = 0;
  bool approx = false;
  coverage->add_option("--height", cov_h, "Image height")->required();
  coverage->add_option("--width", cov_w, "Image width")->required();
  coverage->add_option("--crops", cov_n, "Number of crops n")->required()->check(CLI::PositiveNumber);
  coverage->add_option("--mc-trials", mc_trials, "Monte Carlo trials (0 = off)")->check(CLI::NonNegativeNumber);
  coverage->add_flag("--approx", approx, "Also print the closed-form approximation");
  add_common(coverage, common, "glass-out/coverage");

  auto* table = app.add_subcommand("coverage-table", "Full reference coverage table as CSV and markdown");
  int table_mc = 0;
  table->add_option("--mc-trials", table_mc, "Monte Carlo trials per cell (0 = off)")->check(CLI::NonNegativeNumber);
  add_common(table, common, "glass-out/coverage-table");

  auto* sample = app.add_subcommand("sample", "Sample local crops from one image");
  std::string sample_image;
  int sample_n = 0;
  bool sample_upscale = false;
  sample->add_option("--image", sample_image, "PNG or PPM image")->required();
  sample->add_option("--crops", sample_n, "Number of crops n")->required()->check(CLI::PositiveNumber);
  sample->add_flag("--upscale-small", sample_upscale, "Upscale images below 224 pixels instead of rejecting them");
  add_common(sample, common, "glass-out/sample");

  auto* synth = app.add_subcommand("synth", "Generate the synthetic real/fake corpus");
  SynthArgs synth_args;
  synth->add_option("--count", synth_args.count, "Images per class")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--size", synth_args.size, "Square image side")->capture_default_str();
  synth->add_option("--height", synth_args.height, "Image height (overrides --size)");
  synth->add_option("--width", synth_args.width, "Image width (overrides --size)");
  synth->add_option("--ratios", synth_args.ratios, "train,val,test fractions")->delimiter(',')->expected(3);
  synth->add_option("--amplitude", synth_args.params.amplitude, "Artifact amplitude")->capture_default_str();
  synth->add_option("--patches", synth_args.params.patch_count, "Artifact patches per fake image")
      ->capture_default_str();
  synth->add_option("--patch-size", synth_args.params.patch_size, "Artifact patch side")->capture_default_str();
  add_common(synth, common, "glass-data");

  ExperimentArgs exp;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write checkpoints plus history");
  add_experiment(train_cmd, exp);
  train_cmd->add_flag("--global-only", exp.global_only, "Train the global-only baseline");
  add_common(train_cmd, common, "glass-out/train");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on one split");
  std::string checkpoint, split_name = "test";
  add_experiment(eval_cmd, exp);
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--split", split_name, "train, val or test")->capture_default_str();
  add_common(eval_cmd, common, "glass-out/eval");

  auto* compare = app.add_subcommand("compare", "Train GLASS and the global-only baseline with matched budgets");
  add_experiment(compare, exp);
  add_common(compare, common, "glass-out/compare");

  auto* scaling = app.add_subcommand("scaling", "Time probe epochs and count activations against n");
  ScalingArgs scaling_args;
  scaling->add_option("--config", exp.config_path, "JSON config for architecture and optimiser");
  scaling->add_option("--set", exp.overrides, "Config override key=value (repeatable)");
  scaling->add_option("--ns", scaling_args.ns, "Crop counts")->delimiter(',');
  scaling->add_option("--probe-batches", scaling_args.probe_batches, "Optimiser steps per probe epoch")
      ->check(CLI::PositiveNumber);
  scaling->add_option("--batch-size", scaling_args.batch_size, "Images per step")->capture_default_str();
  scaling->add_option("--image-size", scaling_args.image_size, "Probe image side")->capture_default_str();
  scaling->add_option("--repeats", scaling_args.repeats, "Timed repetitions per n")->check(CLI::PositiveNumber);
  add_common(scaling, common, "glass-out/scaling");

  auto* weights = app.add_subcommand("weights", "Classifier weight distribution of a checkpoint");
  int bins = 41;
  weights->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  weights->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(weights, common, "glass-out/weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return 2;
  }

  const int previous_threads = omp_get_max_threads();
  if (common.threads > 0) omp_set_num_threads(common.threads);
  int code = 1;
  try {
    if (*coverage) code = cmd_coverage(common, cov_h, cov_w, cov_n, mc_trials, approx, out);
    else if (*table) code = cmd_coverage_table(common, table_mc, out);
    else if (*sample) code = cmd_sample(common, sample_image, sample_n, sample_upscale, out);
    else if (*synth) code = cmd_synth(common, synth_args, out);
    else if (*train_cmd) code = cmd_train(common, exp, out);
    else if (*eval_cmd) code = cmd_eval(common, exp, checkpoint, split_name, out);
    else if (*compare) code = cmd_compare(common, exp, out);
    else if (*scaling) code = cmd_scaling(common, exp, scaling_args, out);
    else if (*weights) code = cmd_weights(common, checkpoint, bins, out);
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    code = 1;
  }
  if (common.threads > 0) omp_set_num_threads(previous_threads);
  return code;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv = {"glass"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace glass::cli
