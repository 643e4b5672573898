#include "glass/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "glass/errors.hpp"

namespace glass {
namespace {

void check_pair(std::size_t a, std::size_t b) {
  if (a != b) throw ShapeError("labels and scores differ in length");
  if (a == 0) throw ShapeError("metrics need at least one sample");
}

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

WeightStats stats_of(const std::vector<double>& v, double lo, double hi, int bins) {
  WeightStats s;
  s.count = v.size();
  s.histogram.assign(static_cast<std::size_t>(bins), 0);
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(v.size()));
  const double width = (hi - lo) / bins;
  for (double x : v) {
    int b = width > 0.0 ? static_cast<int>(std::floor((x - lo) / width)) : bins / 2;
    b = std::clamp(b, 0, bins - 1);
    ++s.histogram[b];
  }
  return s;
}

}  // namespace

nlohmann::json to_json(const MetricsReport& r) {
  return {{"accuracy", r.accuracy}, {"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
          {"auc", r.auc},           {"ece", r.ece},             {"loss", r.loss},     {"count", r.count}};
}

BinaryMetrics binary_metrics(std::span<const int> labels, std::span<const double> prob_fake, double threshold) {
  check_pair(labels.size(), prob_fake.size());
  // confusion[truth][prediction]
  double confusion[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int pred = prob_fake[i] >= threshold ? 1 : 0;
    confusion[labels[i] != 0 ? 1 : 0][pred] += 1;
  }
  BinaryMetrics m;
  m.accuracy = (confusion[0][0] + confusion[1][1]) / static_cast<double>(labels.size());
  for (int c = 0; c < 2; ++c) {
    const double tp = confusion[c][c];
    const double predicted = confusion[0][c] + confusion[1][c];
    const double actual = confusion[c][0] + confusion[c][1];
    m.class_precision[c] = safe_div(tp, predicted);
    m.class_recall[c] = safe_div(tp, actual);
    m.class_f1[c] = safe_div(2 * m.class_precision[c] * m.class_recall[c], m.class_precision[c] + m.class_recall[c]);
  }
  m.precision = 0.5 * (m.class_precision[0] + m.class_precision[1]);
  m.recall = 0.5 * (m.class_recall[0] + m.class_recall[1]);
  m.f1 = 0.5 * (m.class_f1[0] + m.class_f1[1]);
  return m;
}

double auc(std::span<const int> labels, std::span<const double> scores) {
  check_pair(labels.size(), scores.size());
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midranks (1-based) over tie groups.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw ShapeError("AUC needs both positive and negative samples");
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

double ece(std::span<const int> labels, std::span<const double> prob_fake, int bins) {
  check_pair(labels.size(), prob_fake.size());
  if (bins < 1) throw ConfigError("ECE needs at least one bin");
  std::vector<double> count(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> conf_sum(count.size(), 0.0);
  std::vector<double> correct(count.size(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = prob_fake[i];
    const double conf = std::max(p, 1.0 - p);
    const int pred = p >= 0.5 ? 1 : 0;
    int b = static_cast<int>(std::floor((conf - 0.5) / 0.5 * bins));
    b = std::clamp(b, 0, bins - 1);
    count[b] += 1;
    conf_sum[b] += conf;
    correct[b] += (pred == (labels[i] != 0 ? 1 : 0)) ? 1.0 : 0.0;
  }
  const auto total = static_cast<double>(labels.size());
  double e = 0.0;
  for (int b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    e += count[b] / total * std::abs(correct[b] / count[b] - conf_sum[b] / count[b]);
  }
  return e;
}

double mean_cross_entropy(std::span<const int> labels, std::span<const double> prob_fake) {
  check_pair(labels.size(), prob_fake.size());
  double s = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = labels[i] != 0 ? prob_fake[i] : 1.0 - prob_fake[i];
    s -= std::log(std::max(p, 1e-12));
  }
  return s / static_cast<double>(labels.size());
}

MetricsReport compute_report(std::span<const int> labels, std::span<const double> prob_fake, int ece_bins) {
  const auto bm = binary_metrics(labels, prob_fake);
  MetricsReport r;
  r.accuracy = bm.accuracy;
  r.precision = bm.precision;
  r.recall = bm.recall;
  r.f1 = bm.f1;
  const bool both = std::any_of(labels.begin(), labels.end(), [](int l) { return l != 0; }) &&
                    std::any_of(labels.begin(), labels.end(), [](int l) { return l == 0; });
  // Single-class sets have no ranking; report chance.
  r.auc = both ? auc(labels, prob_fake) : 0.5;
  r.ece = ece(labels, prob_fake, ece_bins);
  r.loss = mean_cross_entropy(labels, prob_fake);
  r.count = labels.size();
  return r;
}

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ShapeError("xs and ys differ in length");
  if (xs.size() < 2) throw ShapeError("linear fit needs at least two points");
  const auto n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw ShapeError("linear fit needs at least two distinct x values");
  if (syy == 0.0) throw ShapeError("linear fit needs y values with positive variance");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss_res += r * r;
  }
  f.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  return f;
}

template <class Real>
WeightDistribution weight_distribution(const ClassifierParams<Real>& classifier, int embed_dim, int bins) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  const std::size_t inputs = classifier.weight.size() / 2;
  const auto d = static_cast<std::size_t>(embed_dim);
  std::vector<double> global_half, local_half;
  double max_abs = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t k = 0; k < inputs; ++k) {
      const double w = classifier.weight[j * inputs + k];
      (k < d ? global_half : local_half).push_back(w);
      max_abs = std::max(max_abs, std::abs(w));
    }
  }
  WeightDistribution out;
  out.bins = bins;
  out.bin_lo = -max_abs;
  out.bin_hi = max_abs;
  out.global_half = stats_of(global_half, out.bin_lo, out.bin_hi, bins);
  out.local_half = stats_of(local_half, out.bin_lo, out.bin_hi, bins);
  return out;
}

std::string WeightDistribution::summary_csv() const {
  std::ostringstream os;
  os.precision(9);
  os << "half,count,mean,std,min,max\n";
  for (const auto& [name, s] : {std::pair{"global", &global_half}, std::pair{"local", &local_half}}) {
    os << name << ',' << s->count << ',' << s->mean << ',' << s->stddev << ',' << s->min << ',' << s->max << '\n';
  }
  return os.str();
}

std::string WeightDistribution::histogram_csv() const {
  std::ostringstream os;
  os.precision(9);
  os << "bin,lo,hi,global_count,local_count\n";
  const double width = (bin_hi - bin_lo) / bins;
  for (int b = 0; b < bins; ++b) {
    os << b << ',' << bin_lo + b * width << ',' << bin_lo + (b + 1) * width << ',';
    os << (b < static_cast<int>(global_half.histogram.size()) ? global_half.histogram[b] : 0) << ',';
    os << (b < static_cast<int>(local_half.histogram.size()) ? local_half.histogram[b] : 0) << '\n';
  }
  return os.str();
}

template WeightDistribution weight_distribution<float>(const ClassifierParams<float>&, int, int);
template WeightDistribution weight_distribution<double>(const ClassifierParams<double>&, int, int);

}  // namespace glass
