#pragma once

#include <string_view>
#include <vector>

#include "glass/image.hpp"
#include "glass/rng.hpp"

namespace glass {

// Upper limit on the per-axis cell count.
inline constexpr int kMaxGridSize = 8;

enum class Strategy { UniformEntire, StratifiedGrid };

// "entire" / "grid", matching the coverage table annotations.
std::string_view strategy_name(Strategy s);

struct GridPlan {
  int grid_size = 1;  // G
  int cell_height = 0;
  int cell_width = 0;
  Strategy strategy = Strategy::StratifiedGrid;
  int n_crops = 1;
};

// min(floor(min(H, W) / 224), 8). Throws DimensionError below 224.
int grid_size(int height, int width);

// StratifiedGrid iff G^2 >= n.
GridPlan plan(int height, int width, int n);

// n rects with top uniform on [0, H-224] and left uniform on [0, W-224],
// drawn independently. Overlaps allowed.
std::vector<CropRect> sample_uniform(int height, int width, int n, Rng& rng);

// n distinct cells chosen by partial Fisher-Yates over the G^2 cell indices
// (row-major), one crop uniformly placed inside each cell. Pixels beyond
// G * cell_size in either direction belong to no cell.
std::vector<CropRect> sample_stratified(const GridPlan& plan, int height, int width, Rng& rng);

// Dispatches on plan(H, W, n).
std::vector<CropRect> sample_rects(int height, int width, int n, Rng& rng);

struct CropSample {
  std::vector<ImageBuf> crops;
  std::vector<CropRect> rects;
  GridPlan plan;
};

// n original-resolution 224x224 crops plus their rects, in sampling order.
CropSample sample_crops(const ImageBuf& img, int n, Rng& rng);

}  // namespace glass
