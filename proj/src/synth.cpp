#include "glass/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "glass/errors.hpp"
#include "glass/rng.hpp"

namespace glass {
namespace {

struct Cosine {
  double fy;
  double fx;
  double amp;
  double phase;
};

}  // namespace

SynthImage synth_image(Label label, std::uint64_t seed, int height, int width, const SynthParams& params) {
  if (height < params.patch_size || width < params.patch_size) throw DimensionError("synthetic image too small");
  if (params.period < 2 || params.period % 2 != 0) throw ConfigError("checkerboard period must be even and >= 2");

  Rng rng(seed);
  SynthImage out;
  out.image = ImageBuf(height, width);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  for (int c = 0; c < 3; ++c) {
    const double mean = 0.35 + 0.3 * rng.uniform01();
    std::vector<Cosine> waves(static_cast<std::size_t>(params.base_components));
    for (auto& wv : waves) {
      wv.fy = (2.0 * rng.uniform01() - 1.0) * params.max_cycles / height;
      wv.fx = (2.0 * rng.uniform01() - 1.0) * params.max_cycles / width;
      wv.amp = params.component_amp * rng.uniform01();
      wv.phase = two_pi * rng.uniform01();
    }
    // cos(a + b) = cos a cos b - sin a sin b, with a from the row and b from
    // the column, so each wave costs O(H + W) trigonometric calls.
    const std::size_t nw = waves.size();
    std::vector<double> row_cos(nw * height), row_sin(nw * height), col_cos(nw * width), col_sin(nw * width);
    for (std::size_t k = 0; k < nw; ++k) {
      for (int y = 0; y < height; ++y) {
        const double a = two_pi * waves[k].fy * y;
        row_cos[k * height + y] = waves[k].amp * std::cos(a);
        row_sin[k * height + y] = waves[k].amp * std::sin(a);
      }
      for (int x = 0; x < width; ++x) {
        const double b = two_pi * waves[k].fx * x + waves[k].phase;
        col_cos[k * width + x] = std::cos(b);
        col_sin[k * width + x] = std::sin(b);
      }
    }
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double v = mean;
        for (std::size_t k = 0; k < nw; ++k) {
          v += row_cos[k * height + y] * col_cos[k * width + x] - row_sin[k * height + y] * col_sin[k * width + x];
        }
        v += params.noise * (2.0 * rng.uniform01() - 1.0);
        out.image.at(c, y, x) = static_cast<float>(v);
      }
    }
  }

  if (label == Label::Fake) {
    const int half = params.period / 2;
    const int max_top = (height - params.patch_size) / params.period;
    const int max_left = (width - params.patch_size) / params.period;
    for (int k = 0; k < params.patch_count; ++k) {
      const CropRect patch{static_cast<int>(rng.uniform_int(0, max_top)) * params.period,
                           static_cast<int>(rng.uniform_int(0, max_left)) * params.period, params.patch_size};
      out.patches.push_back(patch);
      for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < patch.side; ++i) {
          for (int j = 0; j < patch.side; ++j) {
            const double sign = ((i / half + j / half) % 2 == 0) ? 1.0 : -1.0;
            out.image.at(c, patch.top + i, patch.left + j) += static_cast<float>(sign * params.amplitude);
          }
        }
      }
    }
  }

  for (float& v : out.image.data) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

DatasetManifest synth_corpus(int count_per_class, int height, int width, std::uint64_t seed,
                             const std::filesystem::path& out_dir, const SynthParams& params,
                             const SplitRatios& ratios) {
  if (count_per_class < 1) throw ConfigError("count per class must be at least 1");
  if (height < 2 * kCropSide || width < 2 * kCropSide) {
    throw DimensionError("synthetic images must be at least 448x448");
  }
  std::error_code ec;
  for (const char* sub : {"real", "fake"}) {
    std::filesystem::create_directories(out_dir / sub, ec);
    if (ec) throw IoError("cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }

  DatasetManifest manifest;
  manifest.entries.resize(static_cast<std::size_t>(2 * count_per_class));
  const int total = 2 * count_per_class;
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < total; ++idx) {
    const Label label = idx < count_per_class ? Label::Real : Label::Fake;
    const int i = idx % count_per_class;
    char name[64];
    std::snprintf(name, sizeof(name), "%s/%s_%05d.png", to_string(label), to_string(label), i);
    try {
      const auto img = synth_image(label, Rng::derive(seed, static_cast<std::uint64_t>(i)), height, width, params);
      write_png(img.image, out_dir / name);
    } catch (const std::exception& e) {
#pragma omp critical
      failure = e.what();
    }
    manifest.entries[idx] = {name, label, Split::Unassigned};
  }
  if (!failure.empty()) throw IoError(failure);

  if (count_per_class >= 3) {
    manifest = split_dataset(std::move(manifest), ratios, seed);
  } else {
    manifest.seed = seed;
    manifest.ratios = ratios;
  }
  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace glass
