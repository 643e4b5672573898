#include "glass/coverage.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "glass/errors.hpp"
#include "glass/kernels.hpp"

namespace glass {
namespace {

void validate(const CoverageQuery& q) {
  if (q.crop_side < 1) throw DimensionError("crop side must be positive");
  if (q.height < q.crop_side || q.width < q.crop_side) {
    throw DimensionError("image " + std::to_string(q.height) + "x" + std::to_string(q.width) +
                         " is smaller than the crop side " + std::to_string(q.crop_side));
  }
  if (q.height < kCropSide || q.width < kCropSide) {
    throw DimensionError("image " + std::to_string(q.height) + "x" + std::to_string(q.width) +
                         " is below the 224-pixel minimum");
  }
  if (q.n < 1) throw ConfigError("number of crops must be at least 1");
}

std::vector<int> cover_counts(int extent, int p) {
  std::vector<int> counts(static_cast<std::size_t>(extent));
  for (int y = 0; y < extent; ++y) counts[y] = row_cover_count(y, extent, p);
  return counts;
}

}  // namespace

int row_cover_count(int y, int extent, int p) {
  if (p < 1 || extent < p || y < 0 || y >= extent) {
    throw DimensionError("row_cover_count requires 0 <= y < extent and extent >= p >= 1");
  }
  return std::min(y, extent - p) - std::max(0, y - p + 1) + 1;
}

CoverageResult expected_coverage_exact(const CoverageQuery& q) {
  validate(q);
  const GridPlan gp = plan(q.height, q.width, q.n);
  CoverageResult r;
  r.strategy = gp.strategy;
  const double area = static_cast<double>(q.height) * q.width;
  const double crop_area = static_cast<double>(q.crop_side) * q.crop_side;
  if (gp.strategy == Strategy::StratifiedGrid) {
    r.method = CoverageMethod::GridExact;
    r.percent = std::min(100.0, 100.0 * q.n * crop_area / area);
    return r;
  }
  r.method = CoverageMethod::ExactSum;
  const auto rows = cover_counts(q.height, q.crop_side);
  const auto cols = cover_counts(q.width, q.crop_side);
  const double positions = static_cast<double>(q.height - q.crop_side + 1) * (q.width - q.crop_side + 1);
  r.percent = std::clamp(100.0 * kernels::coverage_sum(rows, cols, positions, q.n) / area, 0.0, 100.0);
  return r;
}

CoverageResult expected_coverage_approx(const CoverageQuery& q) {
  validate(q);
  CoverageResult r;
  r.strategy = plan(q.height, q.width, q.n).strategy;
  r.method = CoverageMethod::ClosedFormApprox;
  const double frac = static_cast<double>(q.crop_side) * q.crop_side / (static_cast<double>(q.height) * q.width);
  r.percent = 100.0 * (1.0 - std::pow(1.0 - frac, q.n));
  return r;
}

CoverageResult mc_coverage(const CoverageQuery& q, int trials, std::uint64_t seed, std::int64_t max_pixels) {
  validate(q);
  if (trials < 1) throw ConfigError("Monte Carlo needs at least one trial");
  if (q.crop_side != kCropSide) throw ConfigError("Monte Carlo coverage uses the sampler's 224-pixel crops");
  const std::int64_t pixels = static_cast<std::int64_t>(q.height) * q.width;
  if (pixels > max_pixels) {
    throw DimensionError("coverage bitmap of " + std::to_string(pixels) + " pixels exceeds the cap of " +
                         std::to_string(max_pixels));
  }

  std::vector<std::int64_t> counts(static_cast<std::size_t>(trials));
#pragma omp parallel
  {
    std::vector<std::uint8_t> bitmap(static_cast<std::size_t>(pixels), 0);
#pragma omp for schedule(static)
    for (int t = 0; t < trials; ++t) {
      Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
      const auto rects = sample_rects(q.height, q.width, q.n, rng);
      std::int64_t covered = 0;
      for (const auto& r : rects) {
        for (int i = 0; i < r.side; ++i) {
          std::uint8_t* row = bitmap.data() + static_cast<std::size_t>(r.top + i) * q.width + r.left;
          for (int j = 0; j < r.side; ++j) {
            covered += row[j] == 0;
            row[j] = 1;
          }
        }
      }
      for (const auto& r : rects) {
        for (int i = 0; i < r.side; ++i) {
          std::uint8_t* row = bitmap.data() + static_cast<std::size_t>(r.top + i) * q.width + r.left;
          std::fill(row, row + r.side, std::uint8_t{0});
        }
      }
      counts[t] = covered;
    }
  }

  // Integer sums keep the variance exactly zero when every trial covers the
  // same pixel count (grid plans).
  __int128 sum = 0, sum_sq = 0;
  for (std::int64_t c : counts) {
    sum += c;
    sum_sq += static_cast<__int128>(c) * c;
  }
  const double scale = 100.0 / static_cast<double>(pixels);
  const double mean = scale * static_cast<double>(sum) / trials;
  // sum over trials of (c - mean_c)^2 = (T * sum_sq - sum^2) / T
  const double ss = scale * scale * static_cast<double>(trials * sum_sq - sum * sum) / trials;

  CoverageResult r;
  r.method = CoverageMethod::MonteCarlo;
  r.strategy = plan(q.height, q.width, q.n).strategy;
  r.percent = mean;
  r.trials = trials;
  r.std_error = trials > 1 ? std::sqrt(ss / (trials - 1) / trials) : 0.0;
  return r;
}

std::string format_percent(double percent) {
  const auto tenths = static_cast<long long>(std::round(percent * 10.0));  // std::round: half away from zero
  const long long whole = std::llabs(tenths) / 10;
  const long long frac = std::llabs(tenths) % 10;
  return std::string(tenths < 0 ? "-" : "") + std::to_string(whole) + "." + std::to_string(frac);
}

std::string CoverageTable::to_csv() const {
  std::ostringstream os;
  os << "height,width,n,strategy,exact_percent,approx_percent,mc_percent,mc_stderr\n";
  os.precision(10);
  for (const auto& r : rows) {
    os << r.height << ',' << r.width << ',' << r.n << ',' << strategy_name(r.strategy) << ','
       << format_percent(r.exact) << ',' << format_percent(r.approx) << ',';
    if (r.mc) {
      os << r.mc->percent << ',' << r.mc->std_error;
    } else {
      os << ',';
    }
    os << '\n';
  }
  return os.str();
}

std::string CoverageTable::to_markdown() const {
  std::ostringstream os;
  os << "| Image size (W x H) |";
  for (int n : ns) os << " n=" << n << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < ns.size(); ++i) os << "---|";
  os << '\n';
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    os << "| " << sizes[s].second << " x " << sizes[s].first << " |";
    for (std::size_t k = 0; k < ns.size(); ++k) {
      const auto& r = rows[s * ns.size() + k];
      os << ' ' << format_percent(r.exact) << ' ' << strategy_name(r.strategy) << " |";
    }
    os << '\n';
  }
  return os.str();
}

CoverageTable coverage_table(const std::vector<std::pair<int, int>>& sizes, const std::vector<int>& ns,
                             const CoverageTableOptions& options) {
  CoverageTable table;
  table.sizes = sizes;
  table.ns = ns;
  for (const auto& [h, w] : sizes) {
    for (int n : ns) {
      const CoverageQuery q{h, w, kCropSide, n};
      CoverageRow row;
      row.height = h;
      row.width = w;
      row.n = n;
      const auto exact = expected_coverage_exact(q);
      row.strategy = exact.strategy;
      row.exact = exact.percent;
      row.approx = expected_coverage_approx(q).percent;
      if (options.mc_trials > 0 && static_cast<std::int64_t>(h) * w <= options.mc_pixel_cap) {
        row.mc = mc_coverage(q, options.mc_trials, Rng::derive(options.seed, static_cast<std::uint64_t>(h),
                                                               static_cast<std::uint64_t>(w) * 64 + n),
                             options.mc_pixel_cap);
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

std::vector<std::pair<int, int>> reference_table_sizes() {
  return {{224, 224},   {256, 256},   {480, 640},   {768, 1024},  {720, 1280},
          {1080, 1920}, {1440, 2560}, {2160, 3840}, {2880, 5120}, {4320, 7680}};
}

std::vector<int> reference_table_ns() { return {2, 4, 6, 8, 10, 12, 14, 16}; }

}  // namespace glass
