#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "glass/errors.hpp"
#include "glass/metrics.hpp"
#include "glass/rng.hpp"
#include "oracles.hpp"

using namespace glass;

TEST_CASE("binary metrics: all correct") {
  const std::vector<int> y = {1, 0, 1, 0};
  const std::vector<double> p = {0.9, 0.1, 0.7, 0.2};
  const auto m = binary_metrics(y, p);
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);
}

TEST_CASE("binary metrics: hand confusion matrix") {
  const std::vector<int> y = {1, 0, 1, 0};
  const std::vector<double> p = {0.9, 0.2, 0.3, 0.4};  // predictions 1,0,0,0
  const auto m = binary_metrics(y, p);
  CHECK(m.accuracy == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m.class_precision[1] == 1.0);
  CHECK(m.class_recall[1] == 0.5);
  CHECK(m.class_precision[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(m.class_recall[0] == 1.0);
  CHECK(m.precision == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(m.recall == doctest::Approx(0.75).epsilon(1e-15));
  const double f1 = (2.0 * 1.0 * 0.5 / 1.5 + 2.0 * (2.0 / 3.0) / (5.0 / 3.0)) / 2.0;
  CHECK(m.f1 == doctest::Approx(f1).epsilon(1e-15));
}

TEST_CASE("binary metrics: threshold is inclusive and 0/0 gives 0") {
  const std::vector<int> y = {0, 0};
  const std::vector<double> p = {0.5, 0.5};
  const auto m = binary_metrics(y, p);
  CHECK(m.accuracy == 0.0);
  CHECK(m.class_precision[0] == 0.0);  // nothing predicted real
  CHECK(m.class_recall[1] == 0.0);     // no fake samples
}

TEST_CASE("binary metrics: errors") {
  const std::vector<int> y = {0, 1};
  const std::vector<double> p = {0.5};
  CHECK_THROWS_AS(binary_metrics(y, p), ShapeError);
  CHECK_THROWS_AS(binary_metrics({}, {}), ShapeError);
}

TEST_CASE("binary metrics agree with brute-force confusion enumeration") {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_below(40));
    std::vector<int> y(n);
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) {
      y[i] = static_cast<int>(rng.uniform_below(2));
      p[i] = rng.uniform_below(4) == 0 ? 0.5 : rng.uniform01();
    }
    const auto m = binary_metrics(y, p);
    const auto o = oracle::confusion(y, p);
    REQUIRE(m.accuracy == doctest::Approx(o.accuracy).epsilon(1e-12));
    REQUIRE(m.precision == doctest::Approx(o.precision).epsilon(1e-12));
    REQUIRE(m.recall == doctest::Approx(o.recall).epsilon(1e-12));
    REQUIRE(m.f1 == doctest::Approx(o.f1).epsilon(1e-12));
  }
}

TEST_CASE("auc: hand cases") {
  CHECK(auc(std::vector<int>{1, 1, 0, 0}, std::vector<double>{0.9, 0.8, 0.8, 0.1}) == 0.875);
  CHECK(auc(std::vector<int>{1, 0}, std::vector<double>{0.9, 0.1}) == 1.0);
  CHECK(auc(std::vector<int>{1, 0}, std::vector<double>{0.1, 0.9}) == 0.0);
  CHECK_THROWS_AS(auc(std::vector<int>{1, 1}, std::vector<double>{0.1, 0.9}), ShapeError);
}

TEST_CASE("auc matches pairwise enumeration and is invariant to monotone transforms") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(30));
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) {
      y[i] = i < 2 ? i : static_cast<int>(rng.uniform_below(2));
      s[i] = static_cast<double>(rng.uniform_below(8)) / 8.0;  // plenty of ties
    }
    const double a = auc(y, s);
    REQUIRE(a == doctest::Approx(oracle::pairwise_auc(y, s)).epsilon(1e-12));
    std::vector<double> t(n);
    std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(3 * v) - 7; });
    REQUIRE(auc(y, t) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("ece: hand cases") {
  // (conf 0.8, correct) and (conf 0.6, wrong) in one bin
  CHECK(ece(std::vector<int>{1, 1}, std::vector<double>{0.8, 0.4}, 1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(ece(std::vector<int>{1, 0}, std::vector<double>{1.0, 0.0}) == 0.0);
  // 0.5-confidence predictions on a balanced set
  CHECK(ece(std::vector<int>{1, 0, 1, 0}, std::vector<double>{0.5, 0.5, 0.5, 0.5}) == doctest::Approx(0.0));
  CHECK_THROWS(ece(std::vector<int>{}, std::vector<double>{}));
  CHECK_THROWS_AS(ece(std::vector<int>{1}, std::vector<double>{0.7}, 0), ConfigError);
}

TEST_CASE("ece is zero when every bin is calibrated") {
  // Bin [0.9, 1.0] with confidence 0.9 and 90% accuracy, by construction.
  std::vector<int> y;
  std::vector<double> p;
  for (int i = 0; i < 10; ++i) {
    y.push_back(i < 9 ? 1 : 0);
    p.push_back(0.9);
  }
  CHECK(ece(y, p, 5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("linear fit: hand OLS and exact affine recovery") {
  const auto f = linear_fit(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 2});
  CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(0.75).epsilon(1e-12));

  const std::vector<double> xs = {1, 2, 4, 8, 16};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(123456.0 * x + 98765.0);
  const auto g = linear_fit(xs, ys);
  CHECK(std::abs(g.slope - 123456.0) / 123456.0 < 1e-9);
  CHECK(std::abs(g.intercept - 98765.0) / 98765.0 < 1e-9);
  CHECK(g.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("linear fit: preconditions") {
  CHECK_THROWS_AS(linear_fit(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(linear_fit(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}), ShapeError);
  CHECK_THROWS_AS(linear_fit(std::vector<double>{1}, std::vector<double>{5}), ShapeError);
}

TEST_CASE("compute_report fills every field") {
  const std::vector<int> y = {1, 0, 1, 0};
  const std::vector<double> p = {0.9, 0.2, 0.3, 0.4};
  const auto r = compute_report(y, p);
  CHECK(r.count == 4);
  CHECK(r.accuracy == doctest::Approx(0.75));
  CHECK(r.auc == doctest::Approx(0.75));
  CHECK(r.loss == doctest::Approx(mean_cross_entropy(y, p)));
  const auto j = to_json(r);
  for (const char* key : {"accuracy", "precision", "recall", "f1", "auc", "ece", "loss", "count"}) {
    CHECK(j.contains(key));
  }
}

TEST_CASE("weight distribution splits the classifier column-wise") {
  const int d = 3;
  ClassifierParams<float> c;
  c.weight = {1, 2, 3, -1, -2, -3,  //
              4, 5, 6, -4, -5, -6};
  c.bias = {0, 0};
  const auto w = weight_distribution(c, d, 41);
  CHECK(w.global_half.count == 6);
  CHECK(w.local_half.count == 6);
  CHECK(w.global_half.mean == doctest::Approx((1 + 2 + 3 + 4 + 5 + 6) / 6.0));
  CHECK(w.local_half.max == doctest::Approx(-1.0));
  CHECK(w.bin_hi == doctest::Approx(6.0));
  CHECK(w.bin_lo == doctest::Approx(-6.0));
  std::size_t total = 0;
  for (auto h : w.global_half.histogram) total += h;
  for (auto h : w.local_half.histogram) total += h;
  CHECK(total == c.weight.size());
}

TEST_CASE("weight distribution: zero weights and reference counts") {
  for (int d : {768, 2048}) {
    ClassifierParams<float> c;
    c.weight.assign(static_cast<std::size_t>(4 * d), 0.0f);
    c.bias = {0, 0};
    const auto w = weight_distribution(c, d);
    CHECK(w.global_half.count + w.local_half.count == static_cast<std::size_t>(4 * d));
    CHECK(w.global_half.mean == 0.0);
    CHECK(w.global_half.stddev == 0.0);
    CHECK(w.local_half.stddev == 0.0);
  }
}
