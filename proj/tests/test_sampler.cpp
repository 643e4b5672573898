#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "glass/coverage.hpp"
#include "glass/errors.hpp"
#include "glass/sampler.hpp"
#include "oracles.hpp"

using namespace glass;

TEST_CASE("grid size rule") {
  CHECK(grid_size(224, 224) == 1);
  CHECK(grid_size(1080, 1920) == 4);
  CHECK(grid_size(1920, 1080) == 4);
  CHECK(grid_size(2880, 5120) == 8);
  CHECK(grid_size(447, 5000) == 1);
  CHECK_THROWS_AS(grid_size(223, 500), DimensionError);
  CHECK_THROWS_AS(grid_size(500, 100), DimensionError);
}

TEST_CASE("plan chooses the strategy from G^2 versus n") {
  CHECK(plan(480, 640, 4).strategy == Strategy::StratifiedGrid);
  CHECK(plan(480, 640, 6).strategy == Strategy::UniformEntire);
  CHECK(plan(224, 224, 2).strategy == Strategy::UniformEntire);
  CHECK(plan(224, 224, 1).strategy == Strategy::StratifiedGrid);
  const auto p = plan(1080, 1920, 2);
  CHECK(p.grid_size == 4);
  CHECK(p.cell_height == 270);
  CHECK(p.cell_width == 480);
  CHECK(strategy_name(Strategy::StratifiedGrid) == "grid");
  CHECK(strategy_name(Strategy::UniformEntire) == "entire");
}

TEST_CASE("cells are never smaller than a crop") {
  for (int h = 224; h < 3000; h += 37) {
    for (int w = 224; w < 3000; w += 53) {
      const auto p = plan(h, w, 1);
      REQUIRE(p.cell_height >= 224);
      REQUIRE(p.cell_width >= 224);
      REQUIRE(p.grid_size * p.cell_height <= h);
      REQUIRE(p.grid_size * p.cell_width <= w);
    }
  }
}

TEST_CASE("uniform sampling: bounds, forced positions, determinism") {
  Rng a(3);
  for (const auto& r : sample_uniform(224, 224, 3, a)) CHECK(r == CropRect{0, 0, 224});
  Rng b(9);
  for (int t = 0; t < 200; ++t) {
    for (const auto& r : sample_uniform(300, 400, 2, b)) {
      REQUIRE(r.top >= 0);
      REQUIRE(r.top <= 76);
      REQUIRE(r.left >= 0);
      REQUIRE(r.left <= 176);
      REQUIRE(r.side == 224);
    }
  }
  Rng c1(42), c2(42), c3(43);
  const auto x = sample_uniform(1000, 800, 5, c1);
  CHECK(x == sample_uniform(1000, 800, 5, c2));
  CHECK(x != sample_uniform(1000, 800, 5, c3));
}

TEST_CASE("uniform sampling is uniform over positions (chi-square)") {
  Rng rng(2024);
  const int draws = 100000;
  std::vector<int> tops(77, 0), lefts(177, 0);
  for (int i = 0; i < draws; ++i) {
    const auto r = sample_uniform(300, 400, 1, rng)[0];
    ++tops[r.top];
    ++lefts[r.left];
  }
  auto chi2 = [&](const std::vector<int>& counts) {
    const double expected = static_cast<double>(draws) / counts.size();
    double s = 0;
    for (int c : counts) s += (c - expected) * (c - expected) / expected;
    return s;
  };
  // 99.9% quantiles of chi-square with 76 and 176 degrees of freedom.
  CHECK(chi2(tops) < 119.85);
  CHECK(chi2(lefts) < 239.72);
}

TEST_CASE("stratified sampling: forced positions on 448x448") {
  Rng rng(1);
  const auto p = plan(448, 448, 4);
  auto rects = sample_stratified(p, 448, 448, rng);
  REQUIRE(rects.size() == 4);
  std::set<std::pair<int, int>> got;
  for (const auto& r : rects) got.insert({r.top, r.left});
  CHECK(got == std::set<std::pair<int, int>>{{0, 0}, {0, 224}, {224, 0}, {224, 224}});
}

TEST_CASE("stratified sampling: disjoint rects in distinct cells") {
  Rng rng(77);
  for (int t = 0; t < 200; ++t) {
    const int h = 1080, w = 1920;
    const int n = 1 + static_cast<int>(rng.uniform_below(16));
    const auto p = plan(h, w, n);
    REQUIRE(p.strategy == Strategy::StratifiedGrid);
    const auto rects = sample_stratified(p, h, w, rng);
    REQUIRE(rects.size() == static_cast<std::size_t>(n));
    std::set<int> cells;
    for (std::size_t i = 0; i < rects.size(); ++i) {
      const int row = rects[i].top / p.cell_height;
      const int col = rects[i].left / p.cell_width;
      REQUIRE(rects[i].top + 224 <= (row + 1) * p.cell_height);
      REQUIRE(rects[i].left + 224 <= (col + 1) * p.cell_width);
      cells.insert(row * p.grid_size + col);
      for (std::size_t j = 0; j < i; ++j) REQUIRE_FALSE(rects[i].overlaps(rects[j]));
    }
    REQUIRE(cells.size() == rects.size());
  }
  // n = G^2 uses every cell once
  const auto p = plan(896, 896, 16);
  const auto rects = sample_stratified(p, 896, 896, rng);
  std::set<std::pair<int, int>> got;
  for (const auto& r : rects) got.insert({r.top, r.left});
  CHECK(got.size() == 16);
}

TEST_CASE("stratified sampling rejects an entire-image plan") {
  Rng rng(0);
  CHECK_THROWS(sample_stratified(plan(448, 448, 5), 448, 448, rng));
}

TEST_CASE("sample_crops returns exact crops in sampling order") {
  const auto img = oracle::random_image(500, 700, 8);
  Rng rng(5);
  const auto s = sample_crops(img, 3, rng);
  REQUIRE(s.crops.size() == 3);
  REQUIRE(s.rects.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(s.crops[i].height == 224);
    CHECK(s.crops[i].width == 224);
    CHECK(s.crops[i] == extract_crop(img, s.rects[i]));
  }
  Rng one(5);
  CHECK(sample_crops(img, 1, one).plan.strategy == Strategy::StratifiedGrid);
}

TEST_CASE("large image with 16 crops gives disjoint crops") {
  const auto p = plan(4320, 7680, 16);
  CHECK(p.grid_size == 8);
  CHECK(p.strategy == Strategy::StratifiedGrid);
  Rng rng(6);
  const auto rects = sample_rects(4320, 7680, 16, rng);
  for (std::size_t i = 0; i < rects.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(rects[i].overlaps(rects[j]));
  }
}

TEST_CASE("strategy annotations over the reference table sizes") {
  // Grid iff G^2 >= n, checked against G computed independently.
  for (const auto& [h, w] : reference_table_sizes()) {
    const int g = std::min(std::min(h, w) / 224, 8);
    for (int n : reference_table_ns()) {
      CHECK((plan(h, w, n).strategy == Strategy::StratifiedGrid) == (g * g >= n));
    }
  }
}
