#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "glass/coverage.hpp"
#include "glass/errors.hpp"

using namespace glass;

namespace {

// Offsets t in [0, extent - p] covering y, counted one by one.
int enumerate_cover(int y, int extent, int p) {
  int count = 0;
  for (int t = 0; t <= extent - p; ++t) count += (t <= y && y <= t + p - 1);
  return count;
}

}  // namespace

TEST_CASE("row cover count") {
  CHECK(row_cover_count(0, 1000, 224) == 1);
  CHECK(row_cover_count(500, 1000, 224) == 224);
  CHECK(row_cover_count(128, 256, 224) == 33);
  for (int extent : {224, 225, 256, 300, 447, 448, 700}) {
    long sum = 0;
    for (int y = 0; y < extent; ++y) {
      REQUIRE(row_cover_count(y, extent, 224) == enumerate_cover(y, extent, 224));
      sum += row_cover_count(y, extent, 224);
    }
    CHECK(sum == static_cast<long>(extent - 224 + 1) * 224);
  }
}

TEST_CASE("exact coverage: spec examples") {
  const auto grid = expected_coverage_exact({1080, 1920, 224, 2});
  CHECK(grid.strategy == Strategy::StratifiedGrid);
  CHECK(grid.method == CoverageMethod::GridExact);
  CHECK(grid.percent == doctest::Approx(100.0 * 2 * 224 * 224 / (1920.0 * 1080.0)));
  CHECK(format_percent(grid.percent) == "4.8");

  const auto entire = expected_coverage_exact({256, 256, 224, 2});
  CHECK(entire.strategy == Strategy::UniformEntire);
  CHECK(entire.method == CoverageMethod::ExactSum);
  CHECK(format_percent(entire.percent) == "83.9");

  CHECK(expected_coverage_exact({224, 224, 224, 5}).percent == doctest::Approx(100.0));
}

TEST_CASE("exact sum equals a brute-force placement enumeration") {
  // Per-pixel hit counts from every valid placement (2-D difference array),
  // then independence across the n draws.
  for (const auto& [h, w] : {std::pair{300, 256}, std::pair{256, 256}, std::pair{230, 400}}) {
    const int p = 224;
    const int ph = h - p + 1, pw = w - p + 1;
    std::vector<long> diff(static_cast<std::size_t>(h + 1) * (w + 1), 0);
    auto at = [&](int y, int x) -> long& { return diff[static_cast<std::size_t>(y) * (w + 1) + x]; };
    for (int t = 0; t < ph; ++t) {
      for (int l = 0; l < pw; ++l) {
        ++at(t, l);
        --at(t, l + p);
        --at(t + p, l);
        ++at(t + p, l + p);
      }
    }
    for (int y = 0; y <= h; ++y) {
      for (int x = 1; x <= w; ++x) at(y, x) += at(y, x - 1);
    }
    for (int y = 1; y <= h; ++y) {
      for (int x = 0; x <= w; ++x) at(y, x) += at(y - 1, x);
    }
    for (int n : {2, 3, 7}) {
      double covered = 0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          covered += 1.0 - std::pow(1.0 - static_cast<double>(at(y, x)) / (static_cast<double>(ph) * pw), n);
        }
      }
      const auto r = expected_coverage_exact({h, w, p, n});
      REQUIRE(r.strategy == Strategy::UniformEntire);
      CHECK(r.percent == doctest::Approx(100.0 * covered / (static_cast<double>(h) * w)).epsilon(1e-12));
    }
  }
}

TEST_CASE("approximation: closed form and upper bound") {
  CHECK(expected_coverage_approx({224, 224, 224, 1}).percent == doctest::Approx(100.0));
  CHECK(expected_coverage_approx({768, 1024, 224, 10}).percent == doctest::Approx(48.28).epsilon(1e-3));
  CHECK(expected_coverage_approx({480, 640, 224, 6}).percent == doctest::Approx(65.70).epsilon(1e-3));
  CHECK(expected_coverage_approx({256, 256, 224, 2}).percent == doctest::Approx(94.5).epsilon(1e-3));
  for (const auto& [h, w] : reference_table_sizes()) {
    for (int n : reference_table_ns()) {
      const CoverageQuery q{h, w, 224, n};
      const auto e = expected_coverage_exact(q);
      if (e.strategy == Strategy::UniformEntire) CHECK(expected_coverage_approx(q).percent >= e.percent - 1e-12);
    }
  }
}

TEST_CASE("exact coverage is non-decreasing in n within a regime") {
  for (const auto& [h, w] : reference_table_sizes()) {
    double prev_entire = -1, prev_grid = -1;
    for (int n = 1; n <= 16; ++n) {
      const auto r = expected_coverage_exact({h, w, 224, n});
      double& prev = r.strategy == Strategy::UniformEntire ? prev_entire : prev_grid;
      CHECK(r.percent >= prev);
      CHECK(r.percent <= 100.0 + 1e-9);
      prev = r.percent;
    }
  }
}

TEST_CASE("monte carlo: grid cases are exact with zero variance") {
  const auto mc = mc_coverage({448, 448, 224, 4}, 50, 1);
  CHECK(mc.percent == doctest::Approx(100.0));
  CHECK(mc.std_error == 0.0);
  const auto mc2 = mc_coverage({1080, 1920, 224, 2}, 50, 1);
  CHECK(mc2.percent == doctest::Approx(expected_coverage_exact({1080, 1920, 224, 2}).percent).epsilon(1e-12));
  CHECK(mc2.std_error == 0.0);
  const auto full = mc_coverage({224, 224, 224, 3}, 20, 1);
  CHECK(full.percent == 100.0);
}

TEST_CASE("monte carlo: entire-image case agrees with the exact value") {
  const CoverageQuery q{480, 640, 224, 6};
  const auto mc = mc_coverage(q, 1000, 17);
  const auto exact = expected_coverage_exact(q);
  CHECK(std::abs(mc.percent - exact.percent) < 0.5);
  CHECK(std::abs(mc.percent - exact.percent) <= 3 * mc.std_error);
  CHECK(mc.trials == 1000);
}

TEST_CASE("monte carlo: deterministic and guarded") {
  const CoverageQuery q{300, 400, 224, 3};
  CHECK(mc_coverage(q, 64, 5).percent == mc_coverage(q, 64, 5).percent);
  CHECK_THROWS(mc_coverage({4320, 7680, 224, 2}, 1, 0, 1'000'000));
  CHECK_THROWS(mc_coverage(q, 0, 0));
}

TEST_CASE("coverage queries reject undersized images") {
  CHECK_THROWS_AS(expected_coverage_exact({100, 100, 224, 2}), DimensionError);
}

TEST_CASE("format_percent rounds half away from zero") {
  CHECK(format_percent(0.25) == "0.3");
  CHECK(format_percent(4.8499) == "4.8");
  CHECK(format_percent(100.0) == "100.0");
  CHECK(format_percent(0.75) == "0.8");
}

TEST_CASE("coverage table layout") {
  const auto t = coverage_table({{224, 224}}, {2});
  REQUIRE(t.rows.size() == 1);
  CHECK(t.to_markdown().find("100.0 entire") != std::string::npos);
  CHECK(t.to_csv().rfind("height,width,n,strategy,exact_percent,approx_percent,mc_percent,mc_stderr\n", 0) == 0);
  const auto empty = coverage_table({{224, 224}}, {});
  CHECK(empty.rows.empty());
}
