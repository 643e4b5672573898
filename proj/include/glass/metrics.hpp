#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "glass/model.hpp"

namespace glass {

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;  // macro over {real, fake}
  double recall = 0.0;
  double f1 = 0.0;  // mean of the per-class F1 scores
  double auc = 0.0;
  double ece = 0.0;
  double loss = 0.0;  // mean cross-entropy
  std::size_t count = 0;
};

nlohmann::json to_json(const MetricsReport& r);

struct BinaryMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Per class, index = label.
  double class_precision[2] = {0.0, 0.0};
  double class_recall[2] = {0.0, 0.0};
  double class_f1[2] = {0.0, 0.0};
};

// Predicts fake iff prob_fake >= threshold. Per-class precision/recall use
// 0/0 -> 0; macro averages over the two classes.
BinaryMetrics binary_metrics(std::span<const int> labels, std::span<const double> prob_fake, double threshold = 0.5);

// Mann-Whitney estimate: fraction of (positive, negative) pairs ranked
// correctly, ties counting one half. O(N log N) via midranks.
double auc(std::span<const int> labels, std::span<const double> scores);

// confidence = max(p, 1 - p); `bins` equal-width bins over [0.5, 1].
double ece(std::span<const int> labels, std::span<const double> prob_fake, int bins = 15);

// Mean -log p(label), probabilities clamped away from 0.
double mean_cross_entropy(std::span<const int> labels, std::span<const double> prob_fake);

MetricsReport compute_report(std::span<const int> labels, std::span<const double> prob_fake, int ece_bins = 15);

// Ordinary least squares with intercept.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

struct WeightStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
  std::vector<std::size_t> histogram;
};

struct WeightDistribution {
  WeightStats global_half;
  WeightStats local_half;
  double bin_lo = 0.0;  // histogram range, symmetric around 0
  double bin_hi = 0.0;
  int bins = 41;

  // summary rows plus one row per histogram bin
  std::string summary_csv() const;
  std::string histogram_csv() const;
};

// Splits the (2, 2D) classifier weight column-wise into the global half
// (columns [0, D)) and local half (columns [D, 2D)). Histograms share the
// range [-m, m] with m the largest absolute weight.
template <class Real>
WeightDistribution weight_distribution(const ClassifierParams<Real>& classifier, int embed_dim, int bins = 41);

}  // namespace glass
