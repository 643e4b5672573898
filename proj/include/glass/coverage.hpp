#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "glass/image.hpp"
#include "glass/sampler.hpp"

namespace glass {

// Expected fraction of an H x W image covered by at least one of n sampled
// p x p crops.
struct CoverageQuery {
  int height = 0;
  int width = 0;
  int crop_side = kCropSide;
  int n = 1;
};

enum class CoverageMethod { ExactSum, ClosedFormApprox, GridExact, MonteCarlo };

struct CoverageResult {
  double percent = 0.0;
  Strategy strategy = Strategy::UniformEntire;
  CoverageMethod method = CoverageMethod::ExactSum;
  double std_error = 0.0;  // Monte Carlo only
  int trials = 0;          // Monte Carlo only
};

// Number of offsets t in [0, extent - p] with t <= y <= t + p - 1.
int row_cover_count(int y, int extent, int p);

// Grid plans are non-overlapping: 100 n p^2 / (H W). Otherwise the per-pixel
// sum of 1 - (1 - a_y b_x / ((H-p+1)(W-p+1)))^n.
CoverageResult expected_coverage_exact(const CoverageQuery& q);

// 100 [1 - (1 - p^2 / (W H))^n]; an upper bound on the exact value when crops
// may overlap.
CoverageResult expected_coverage_approx(const CoverageQuery& q);

inline constexpr std::int64_t kDefaultMcPixelCap = 32'000'000;

// Runs the real sampler `trials` times on a coverage bitmap and reports the
// mean covered percentage and its standard error. Each trial uses the stream
// Rng::derive(seed, trial), so the result does not depend on thread count.
// Requires crop_side == 224 (the sampler's crop size).
CoverageResult mc_coverage(const CoverageQuery& q, int trials, std::uint64_t seed,
                           std::int64_t max_pixels = kDefaultMcPixelCap);

// One decimal, half away from zero, as text ("83.9").
std::string format_percent(double percent);

struct CoverageRow {
  int height = 0;
  int width = 0;
  int n = 0;
  Strategy strategy = Strategy::UniformEntire;
  double exact = 0.0;
  double approx = 0.0;
  std::optional<CoverageResult> mc;
};

struct CoverageTable {
  std::vector<std::pair<int, int>> sizes;  // (height, width)
  std::vector<int> ns;
  std::vector<CoverageRow> rows;  // size-major, n-minor

  std::string to_csv() const;
  // Grid with one line per size and one column per n: "83.9 entire".
  std::string to_markdown() const;
};

struct CoverageTableOptions {
  int mc_trials = 0;  // 0 disables the Monte Carlo column
  std::uint64_t seed = 0;
  std::int64_t mc_pixel_cap = kDefaultMcPixelCap;
};

CoverageTable coverage_table(const std::vector<std::pair<int, int>>& sizes, const std::vector<int>& ns,
                             const CoverageTableOptions& options = {});

// The ten image sizes and even crop counts 2..16 of the reference coverage
// table, sizes given as (height, width).
std::vector<std::pair<int, int>> reference_table_sizes();
std::vector<int> reference_table_ns();

}  // namespace glass
