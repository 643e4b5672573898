// Acceptance run: one PASS/FAIL line per criterion. Criterion keys given on
// the command line restrict the run to those criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "glass/cli.hpp"
#include "glass/coverage.hpp"
#include "glass/io.hpp"
#include "glass/metrics.hpp"
#include "glass/training.hpp"
#include "oracles.hpp"

using namespace glass;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string key;
  std::string title;
  std::function<Outcome()> run;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  if (code != 0) std::fprintf(stderr, "%s", e.str().c_str());
  return code;
}

bool same_file(const fs::path& a, const fs::path& b) { return read_file_bytes(a) == read_file_bytes(b); }

// history.csv minus its wall-clock column.
std::string history_without_timing(const fs::path& path) {
  std::istringstream in(read_file_text(path));
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

// Table 1 as printed in the reference paper: rows are the image sizes
// (W x H), columns n = 2, 4, ..., 16. 'g' marks the stratified grid legend
// colour, 'e' random cropping on the entire image.
struct PaperRow {
  int width;
  int height;
  const char* values[8];
  const char* strategies;
};

const PaperRow kPaperTable[] = {
    {224, 224, {"100.0", "100.0", "100.0", "100.0", "100.0", "100.0", "100.0", "100.0"}, "eeeeeeee"},
    {256, 256, {"83.9", "90.0", "92.8", "94.4", "95.4", "96.2", "96.7", "97.1"}, "eeeeeeee"},
    {640, 480, {"32.7", "65.3", "53.8", "60.5", "65.3", "69.0", "71.9", "74.2"}, "ggeeeeee"},
    {1024, 768, {"12.8", "25.5", "38.3", "51.0", "43.8", "48.8", "53.1", "56.8"}, "ggggeeee"},
    {1280, 720, {"10.9", "21.8", "32.7", "43.6", "39.5", "44.5", "48.8", "52.6"}, "ggggeeee"},
    {1920, 1080, {"4.8", "9.7", "14.5", "19.4", "24.2", "29.0", "33.9", "38.7"}, "gggggggg"},
    {2560, 1440, {"2.7", "5.4", "8.2", "10.9", "13.6", "16.3", "19.1", "21.8"}, "gggggggg"},
    {3840, 2160, {"1.2", "2.4", "3.6", "4.8", "6.0", "7.3", "8.5", "9.7"}, "gggggggg"},
    {5120, 2880, {"0.7", "1.4", "2.0", "2.7", "3.4", "4.1", "4.8", "5.4"}, "gggggggg"},
    {7680, 4320, {"0.3", "0.6", "0.9", "1.2", "1.5", "1.8", "2.1", "2.4"}, "gggggggg"},
};

Outcome table_reproduction() {
  std::vector<std::pair<int, int>> sizes;
  for (const auto& r : kPaperTable) sizes.emplace_back(r.height, r.width);
  const std::vector<int> ns = {2, 4, 6, 8, 10, 12, 14, 16};
  const auto start = std::chrono::steady_clock::now();
  const auto table = coverage_table(sizes, ns);
  const double secs = seconds_since(start);
  int value_ok = 0, strategy_ok = 0;
  std::string first_miss;
  for (const auto& row : table.rows) {
    for (std::size_t r = 0; r < std::size(kPaperTable); ++r) {
      const auto& p = kPaperTable[r];
      if (p.height != row.height || p.width != row.width) continue;
      const std::size_t k = static_cast<std::size_t>(row.n / 2 - 1);
      const bool v = format_percent(row.exact) == p.values[k];
      const char expected = p.strategies[k] == 'g' ? 'g' : 'e';
      const bool s = (row.strategy == Strategy::StratifiedGrid ? 'g' : 'e') == expected;
      value_ok += v;
      strategy_ok += s;
      if ((!v || !s) && first_miss.empty()) {
        first_miss = "; first miss " + std::to_string(p.width) + "x" + std::to_string(p.height) + " n=" +
                     std::to_string(row.n);
      }
    }
  }
  const bool pass = table.rows.size() == 80 && value_ok == 80 && strategy_ok == 80 && secs < 10.0;
  return {pass, std::to_string(value_ok) + "/80 values, " + std::to_string(strategy_ok) + "/80 strategies, " +
                    fmt("%.2f s", secs) + first_miss};
}

Outcome monte_carlo_agreement() {
  const std::vector<CoverageQuery> queries = {
      {256, 256, 224, 2},   {256, 256, 224, 8},   {480, 640, 224, 6},   {480, 640, 224, 12},
      {768, 1024, 224, 10}, {768, 1024, 224, 16}, {720, 1280, 224, 14}, {300, 400, 224, 3},
      {230, 240, 224, 2},   {224, 224, 224, 3},   {480, 640, 224, 2},   {480, 640, 224, 4},
      {768, 1024, 224, 6},  {1080, 1920, 224, 8}, {448, 448, 224, 4},   {720, 1280, 224, 8}};
  int agree = 0, grid = 0, grid_exact = 0;
  double worst_z = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    const auto exact = expected_coverage_exact(q);
    const auto mc = mc_coverage(q, 1000, 1000 + i);
    const double diff = std::abs(mc.percent - exact.percent);
    if (exact.strategy == Strategy::StratifiedGrid) {
      ++grid;
      const bool ok = mc.std_error == 0.0 && diff < 1e-9;
      grid_exact += ok;
      agree += ok;
    } else {
      const bool ok = mc.std_error > 0.0 ? diff <= 3.0 * mc.std_error : diff < 1e-9;
      if (mc.std_error > 0.0) worst_z = std::max(worst_z, diff / mc.std_error);
      agree += ok;
    }
  }
  const int n = static_cast<int>(queries.size());
  return {agree == n && grid >= 1 && grid < n && grid_exact == grid,
          std::to_string(agree) + "/" + std::to_string(n) + " pairs within 3 SE (max " + fmt("%.2f", worst_z) +
              " SE), " + std::to_string(grid_exact) + "/" + std::to_string(grid) +
              " grid cases with zero variance, 1000 trials each"};
}

Outcome approximation_bound() {
  int entire = 0, bounded = 0;
  for (const auto& r : kPaperTable) {
    for (int n = 2; n <= 16; n += 2) {
      const CoverageQuery q{r.height, r.width, 224, n};
      const auto e = expected_coverage_exact(q);
      if (e.strategy != Strategy::UniformEntire) continue;
      ++entire;
      bounded += expected_coverage_approx(q).percent >= e.percent - 1e-12;
    }
  }
  const CoverageQuery q{768, 1024, 224, 10};
  const std::string a = format_percent(expected_coverage_approx(q).percent);
  const std::string e = format_percent(expected_coverage_exact(q).percent);
  return {entire > 0 && bounded == entire && a == "48.3" && e == "43.8",
          std::to_string(bounded) + "/" + std::to_string(entire) + " entire-image cells bounded; 1024x768 n=10: approx " +
              a + " vs exact " + e};
}

Outcome attention_invariants() {
  double sum = 0, perm = 0, shift = 0, min_w = 1;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto c = oracle::attention_instance(100000 + s);
    sum = std::max(sum, c.sum_error);
    perm = std::max(perm, c.permutation_error);
    shift = std::max(shift, c.shift_error);
    min_w = std::min(min_w, c.min_weight);
  }
  return {min_w >= 0.0 && sum < 1e-6 && perm < 1e-6 && shift < 1e-6,
          "1000 instances; max |sum-1| " + fmt("%.1e", sum) + ", permutation " + fmt("%.1e", perm) + ", shift " +
              fmt("%.1e", shift) + ", min weight " + fmt("%.1e", min_w)};
}

Outcome gradient_check() {
  ArchConfig arch;
  arch.embed_dim = 4;
  arch.attn_hidden = 4;
  arch.channels = {8};
  auto model = init_params<double>(arch, 21);
  Rng perturb(22);
  model.for_each([&](const std::string&, ParamGroup, const std::vector<int>&, std::span<double> s) {
    for (auto& v : s) v += 0.3 * perturb.normal();
  });
  // A grid-sampled 448x448 image and an entire-image-sampled 300x260 one,
  // both resized for the global stream; dropout active.
  const auto a = oracle::random_image(448, 448, 23);
  const auto b = oracle::random_image(300, 260, 24);
  const std::vector<Example> batch = {{&a, 1}, {&b, 0}};
  const auto check = oracle::finite_difference_check(model, batch, 3, 25, {true, 0.3}, 1e-6);
  return {check.checked == model.parameter_count() && check.max_rel_error < 1e-3,
          std::to_string(check.checked) + " parameters, max relative error " + fmt("%.2e", check.max_rel_error) +
              " (" + check.worst + ")"};
}

Outcome desk_comparison() {
  const auto dir = oracle::fresh_dir("desk");
  const auto data = (dir / "data").string();
  const auto start = std::chrono::steady_clock::now();
  // 400 per class split 250/50/100: train, validation, test.
  if (cli({"synth", "--count", "400", "--size", "448", "--seed", "7", "--ratios", "0.625,0.125,0.25", "--out-dir",
           data}) != 0) {
    return {false, "synth failed"};
  }
  std::string log;
  const int code = cli({"compare", "--data-dir", data, "--epochs", "25", "--seed", "7", "--set", "channels=[8,16,32]",
                        "--out-dir", (dir / "compare").string()},
                       &log);
  const double secs = seconds_since(start);
  std::printf("%s", log.c_str());
  if (code != 0) return {false, "compare failed"};
  const auto j = nlohmann::json::parse(read_file_text(dir / "compare" / "compare.json"));
  const double g = j.at("glass").at("accuracy").get<double>();
  const double b = j.at("global_only").at("accuracy").get<double>();
  const auto manifest = read_manifest(dir / "data" / "manifest.json");
  const bool sizes = manifest.select(Split::Train).size() == 500 && manifest.select(Split::Test).size() == 200;
  return {sizes && g >= 0.90 && (g - b) * 100.0 >= 10.0 && secs < 1800.0,
          "GLASS " + fmt("%.3f", g) + " vs global-only " + fmt("%.3f", b) + " (gain " + fmt("%.1f", 100 * (g - b)) +
              " points), " + fmt("%.0f s total", secs)};
}

Outcome scaling_linearity() {
  ScalingOptions opts;
  opts.batch_size = 32;
  opts.image_size = 448;
  opts.repeats = 1;
  const auto r = scaling_report(ArchConfig{}, TrainConfig{}, {1, 2, 4, 8, 16}, 2, opts);
  std::printf("%s", r.to_markdown().c_str());
  const double act = r.activation_fit.r_squared;
  const double time = r.time_fit.r_squared;
  return {fmt("%.3f", act) == "1.000" && std::abs(act - 1.0) < 1e-12 && time >= 0.95,
          "activation R^2 " + fmt("%.6f", act) + ", wall-time R^2 " + fmt("%.4f", time) +
              " over n = 1, 2, 4, 8, 16 at batch 32"};
}

Outcome metrics_suite() {
  int failures = 0;
  auto near = [&](double a, double b, double tol = 1e-12) { failures += !(std::abs(a - b) <= tol); };
  near(auc(std::vector<int>{1, 1, 0, 0}, std::vector<double>{0.9, 0.8, 0.8, 0.1}), 0.875, 0.0);
  near(ece(std::vector<int>{1, 1}, std::vector<double>{0.8, 0.4}, 1), 0.2);
  const auto m = binary_metrics(std::vector<int>{1, 0, 1, 0}, std::vector<double>{0.9, 0.2, 0.3, 0.4});
  near(m.accuracy, 0.75);
  near(m.precision, 5.0 / 6.0);
  near(m.recall, 0.75);
  near(m.f1, (2.0 * 0.5 / 1.5 + 2.0 * (2.0 / 3.0) / (5.0 / 3.0)) / 2.0);
  const auto all = binary_metrics(std::vector<int>{1, 0, 1, 0}, std::vector<double>{0.9, 0.1, 0.7, 0.2});
  near(all.accuracy, 1.0, 0.0);
  near(all.f1, 1.0, 0.0);
  const auto fit = linear_fit(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 2});
  near(fit.slope, 0.5);
  near(fit.intercept, 2.0 / 3.0);
  near(fit.r_squared, 0.75);
  const auto exact = linear_fit(std::vector<double>{1, 2, 4, 8}, std::vector<double>{3, 5, 9, 17});
  near(exact.r_squared, 1.0);
  const int hand_failures = failures;

  Rng rng(77);
  int oracle_agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_below(50));
    std::vector<int> y(static_cast<std::size_t>(n));
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      y[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_below(2));
      p[static_cast<std::size_t>(i)] = rng.uniform_below(5) == 0 ? 0.5 : rng.uniform01();
    }
    const auto got = binary_metrics(y, p);
    const auto want = oracle::confusion(y, p);
    oracle_agree += std::abs(got.accuracy - want.accuracy) < 1e-12 && std::abs(got.precision - want.precision) < 1e-12 &&
                    std::abs(got.recall - want.recall) < 1e-12 && std::abs(got.f1 - want.f1) < 1e-12;
  }
  return {hand_failures == 0 && oracle_agree == 1000,
          std::to_string(12 - hand_failures) + "/12 hand cases, " + std::to_string(oracle_agree) +
              "/1000 brute-force confusion instances"};
}

Outcome determinism() {
  const auto dir = oracle::fresh_dir("determinism");
  const auto data = (dir / "data").string();
  if (cli({"synth", "--count", "4", "--size", "448", "--seed", "3", "--out-dir", data}) != 0) {
    return {false, "synth failed"};
  }
  write_png(oracle::random_image(700, 900, 5), dir / "image.png");
  const std::vector<std::string> tiny = {"--set", "channels=[4,8]", "--set", "embed_dim=8", "--set", "attn_hidden=8",
                                         "--set", "batch_size=2"};
  std::vector<std::string> failed;
  auto pair = [&](const std::string& name, std::vector<std::string> args, const std::vector<std::string>& files) {
    for (const char* run : {"a", "b"}) {
      auto full = args;
      full.insert(full.end(), {"--threads", "1", "--out-dir", (dir / name / run).string()});
      if (cli(full) != 0) {
        failed.push_back(name + " (exit)");
        return;
      }
    }
    for (const auto& f : files) {
      const auto a = dir / name / "a" / f;
      const auto b = dir / name / "b" / f;
      const bool ok = f == "history.csv" ? history_without_timing(a) == history_without_timing(b) : same_file(a, b);
      if (!ok) failed.push_back(name + "/" + f);
    }
  };
  auto train_args = std::vector<std::string>{"train", "--data-dir", data, "--epochs", "2", "--n-crops", "3", "--seed", "9"};
  train_args.insert(train_args.end(), tiny.begin(), tiny.end());
  pair("train", train_args, {"final.ckpt", "best.ckpt", "history.csv", "run.json"});
  if (failed.empty()) {
    pair("eval",
         {"eval", "--checkpoint", (dir / "train" / "a" / "best.ckpt").string(), "--data-dir", data, "--split", "test",
          "--n-crops", "3", "--seed", "9"},
         {"metrics.json", "predictions.json", "run.json"});
  }
  pair("sample", {"sample", "--image", (dir / "image.png").string(), "--crops", "6", "--seed", "4"},
       {"rects.json", "crop_000.png", "crop_005.png", "run.json"});
  pair("coverage",
       {"coverage", "--height", "480", "--width", "640", "--crops", "6", "--approx", "--mc-trials", "100", "--seed", "2"},
       {"coverage.json", "run.json"});
  std::string detail = "train, eval, sample, coverage byte-identical across two --threads 1 runs";
  if (!failed.empty()) {
    detail = "differs:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"table", "Table 1 reproduction (80 cells, strategies, < 10 s)", table_reproduction},
      {"mc", "Monte Carlo oracle agreement", monte_carlo_agreement},
      {"approx", "Approximation upper bound", approximation_bound},
      {"attention", "Attention invariant suite", attention_invariants},
      {"gradient", "Gradient correctness (full composition)", gradient_check},
      {"desk", "Desk-scale GLASS vs global-only", desk_comparison},
      {"scaling", "Scaling linearity", scaling_linearity},
      {"metrics", "Metrics unit suite", metrics_suite},
      {"determinism", "Determinism of train, eval, sample, coverage", determinism},
  };
  const std::set<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.key)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.title.c_str(), o.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
