#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "glass/dataset.hpp"
#include "glass/image.hpp"

namespace glass {

// Desk-scale stand-in for a real/AI-generated corpus. Both classes share the
// same smooth base process; "fake" images additionally carry small
// checkerboard patches whose period is too fine to survive a 2x (or larger)
// bilinear downscale.
struct SynthParams {
  int patch_size = 32;
  int period = 2;  // checkerboard period in pixels, even
  double amplitude = 0.06;
  int patch_count = 12;
  int base_components = 5;
  double max_cycles = 2.0;      // per image side, for the smooth base
  double component_amp = 0.04;  // upper bound per cosine component
  double noise = 0.001;         // half-width of the uniform white noise
};

struct SynthImage {
  ImageBuf image;
  std::vector<CropRect> patches;  // side = patch_size; empty for real images
};

// Same seed gives the same base and noise for either label, so a real/fake
// pair generated from one seed differs only inside the patches. Patch corners
// are aligned to multiples of the period.
SynthImage synth_image(Label label, std::uint64_t seed, int height, int width, const SynthParams& params = {});

// Writes <out_dir>/{real,fake}/<label>_NNNNN.png and <out_dir>/manifest.json
// (stratified split with `ratios`). real_i and fake_i share one base seed and
// land in the same split. Requires height, width >= 448.
DatasetManifest synth_corpus(int count_per_class, int height, int width, std::uint64_t seed,
                             const std::filesystem::path& out_dir, const SynthParams& params = {},
                             const SplitRatios& ratios = {});

}  // namespace glass
