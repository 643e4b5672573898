#include "glass/sampler.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "glass/errors.hpp"

namespace glass {

std::string_view strategy_name(Strategy s) { return s == Strategy::StratifiedGrid ? "grid" : "entire"; }

int grid_size(int height, int width) {
  if (height < kCropSide || width < kCropSide) {
    throw DimensionError("image is " + std::to_string(height) + "x" + std::to_string(width) +
                         "; both sides must be at least " + std::to_string(kCropSide));
  }
  return std::min(std::min(height, width) / kCropSide, kMaxGridSize);
}

GridPlan plan(int height, int width, int n) {
  if (n < 1) throw ConfigError("number of crops must be at least 1");
  GridPlan p;
  p.grid_size = grid_size(height, width);
  p.cell_height = height / p.grid_size;
  p.cell_width = width / p.grid_size;
  p.n_crops = n;
  p.strategy = p.grid_size * p.grid_size >= n ? Strategy::StratifiedGrid : Strategy::UniformEntire;
  return p;
}

std::vector<CropRect> sample_uniform(int height, int width, int n, Rng& rng) {
  if (height < kCropSide || width < kCropSide) throw DimensionError("image smaller than the crop size");
  std::vector<CropRect> rects;
  rects.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int top = static_cast<int>(rng.uniform_int(0, height - kCropSide));
    const int left = static_cast<int>(rng.uniform_int(0, width - kCropSide));
    rects.push_back({top, left, kCropSide});
  }
  return rects;
}

std::vector<CropRect> sample_stratified(const GridPlan& plan, int height, int width, Rng& rng) {
  const int cells = plan.grid_size * plan.grid_size;
  if (plan.strategy != Strategy::StratifiedGrid || cells < plan.n_crops) {
    throw ConfigError("stratified sampling needs a StratifiedGrid plan with G^2 >= n");
  }
  if (plan.cell_height < kCropSide || plan.cell_width < kCropSide || plan.grid_size * plan.cell_height > height ||
      plan.grid_size * plan.cell_width > width) {
    throw DimensionError("grid plan does not match the image dimensions");
  }
  std::vector<int> order(static_cast<std::size_t>(cells));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order), static_cast<std::size_t>(plan.n_crops));

  std::vector<CropRect> rects;
  rects.reserve(static_cast<std::size_t>(plan.n_crops));
  for (int i = 0; i < plan.n_crops; ++i) {
    const int r = order[i] / plan.grid_size;
    const int c = order[i] % plan.grid_size;
    const int row0 = r * plan.cell_height;
    const int col0 = c * plan.cell_width;
    const int top = static_cast<int>(rng.uniform_int(row0, row0 + plan.cell_height - kCropSide));
    const int left = static_cast<int>(rng.uniform_int(col0, col0 + plan.cell_width - kCropSide));
    rects.push_back({top, left, kCropSide});
  }
  return rects;
}

std::vector<CropRect> sample_rects(int height, int width, int n, Rng& rng) {
  const GridPlan p = plan(height, width, n);
  return p.strategy == Strategy::StratifiedGrid ? sample_stratified(p, height, width, rng)
                                                : sample_uniform(height, width, n, rng);
}

CropSample sample_crops(const ImageBuf& img, int n, Rng& rng) {
  CropSample out;
  out.plan = plan(img.height, img.width, n);
  out.rects = out.plan.strategy == Strategy::StratifiedGrid ? sample_stratified(out.plan, img.height, img.width, rng)
                                                            : sample_uniform(img.height, img.width, n, rng);
  out.crops.reserve(out.rects.size());
  for (const auto& r : out.rects) out.crops.push_back(extract_crop(img, r));
  return out;
}

}  // namespace glass
