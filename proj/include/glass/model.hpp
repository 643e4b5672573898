#pragma once

// Two-stream global/local detector.
//
//   image ──resize 224──> global backbone ──> g (D)
//         └─n crops────> local backbone ───> h_1..h_n (D) ──attention──> l (D)
//   [g, l] ──dropout──> linear (2 x 2D) ──softmax──> (p_real, p_fake)
//
// The two backbones share an architecture but not parameters. Everything is
// templated on the scalar type; training runs in float, gradient checks in
// double. Backpropagation is written out by hand per layer.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "glass/image.hpp"
#include "glass/rng.hpp"
#include "glass/sampler.hpp"

namespace glass {

struct ArchConfig {
  int embed_dim = 64;                   // D
  int attn_hidden = 128;                // K
  std::vector<int> channels = {16, 32, 64};
  bool global_only = false;             // baseline: no local branch, attention or local half

  int classifier_inputs() const { return global_only ? embed_dim : 2 * embed_dim; }
  void validate() const;
  friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

enum class ParamGroup { GlobalBackbone, LocalBackbone, Head };
const char* to_string(ParamGroup g);

template <class Real>
struct BackboneParams {
  std::vector<std::vector<Real>> conv_weight;  // per block: (cout, cin, 3, 3)
  std::vector<std::vector<Real>> conv_bias;    // per block: (cout)
  std::vector<Real> proj_weight;               // (D, C_last)
  std::vector<Real> proj_bias;                 // (D)
};

template <class Real>
struct AttentionParams {
  std::vector<Real> w1;  // (K, D)
  std::vector<Real> b1;  // (K)
  std::vector<Real> w2;  // (K)
};

// Columns [0, D) see the global embedding, [D, 2D) the local aggregate.
template <class Real>
struct ClassifierParams {
  std::vector<Real> weight;  // (2, inputs)
  std::vector<Real> bias;    // (2)
};

template <class Real>
struct GlassParams {
  ArchConfig arch;
  BackboneParams<Real> global_backbone;
  BackboneParams<Real> local_backbone;
  AttentionParams<Real> attention;
  ClassifierParams<Real> classifier;

  // All parameters zero, shapes from `arch`.
  static GlassParams zeros(const ArchConfig& arch);

  // Visits every parameter tensor in a fixed order:
  //   f(name, group, shape, span)
  template <class F>
  void for_each(F&& f);
  template <class F>
  void for_each(F&& f) const;

  std::size_t parameter_count() const;
  void fill(Real v);
  // this += other (same architecture)
  void add(const GlassParams& other);
  void scale(Real s);

  template <class Other>
  GlassParams<Other> cast() const;
};

// He-normal convolutions, small normal heads, zero biases. Backbones are drawn
// from independent streams of `seed`.
template <class Real>
GlassParams<Real> init_params(const ArchConfig& arch, std::uint64_t seed);

struct ForwardMode {
  bool train = false;
  double dropout = 0.0;  // applied to the attention hidden layer and the classifier input, train mode only
};

// ---------------------------------------------------------------------------
// Backbone

template <class Real>
struct BackboneCache {
  int height = 0;
  int width = 0;
  std::vector<std::vector<Real>> inputs;       // block inputs
  std::vector<std::vector<Real>> activations;  // post-ReLU conv outputs
  std::vector<Real> pooled;                    // global average pool (C_last)
};

// Pixels enter the first convolution as (v - kPixelMean) / kPixelStd.
inline constexpr double kPixelMean = 0.5;
inline constexpr double kPixelStd = 0.25;

// `pixels` is a (3, h, w) raster. Returns the D-dimensional embedding.
template <class Real>
std::vector<Real> backbone_forward(const BackboneParams<Real>& params, const ArchConfig& arch,
                                   std::span<const Real> pixels, int h, int w, BackboneCache<Real>* cache = nullptr);

// Convenience overload; requires a 3 x 224 x 224 image.
template <class Real>
std::vector<Real> backbone_forward(const BackboneParams<Real>& params, const ArchConfig& arch, const ImageBuf& img);

// Accumulates parameter gradients into `grads`.
template <class Real>
void backbone_backward(const BackboneParams<Real>& params, const ArchConfig& arch, const BackboneCache<Real>& cache,
                       std::span<const Real> grad_embedding, BackboneParams<Real>& grads);

// ---------------------------------------------------------------------------
// Attention pooling

// Numerically stable softmax (max subtracted first). Empty spans are left alone.
template <class Real>
void softmax_inplace(std::span<Real> v) {
  if (v.empty()) return;
  const Real mx = *std::max_element(v.begin(), v.end());
  Real sum = 0;
  for (auto& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (auto& x : v) x /= sum;
}

template <class Real>
struct AttentionOutput {
  std::vector<Real> aggregate;  // (D)
  std::vector<Real> weights;    // (n), softmax of scores
  std::vector<Real> scores;     // (n)
  std::vector<Real> hidden;     // (n, K) tanh activations, before dropout
  std::vector<Real> mask;       // (n, K) inverted-dropout multipliers
};

// score_i = w2 . dropout(tanh(W1 h_i + b1)); weights = softmax(scores);
// aggregate = sum_i weights_i h_i. `embeddings` is (n, D) row-major.
template <class Real>
AttentionOutput<Real> attention_aggregate(const AttentionParams<Real>& params, int embed_dim,
                                          std::span<const Real> embeddings, ForwardMode mode, Rng& rng);

// Accumulates into `grads` and overwrites grad_embeddings (n, D).
template <class Real>
void attention_backward(const AttentionParams<Real>& params, int embed_dim, std::span<const Real> embeddings,
                        const AttentionOutput<Real>& out, std::span<const Real> grad_aggregate,
                        AttentionParams<Real>& grads, std::span<Real> grad_embeddings);

// ---------------------------------------------------------------------------
// Classifier

template <class Real>
struct ClassifierOutput {
  std::array<Real, 2> logits{};
  std::array<Real, 2> probs{};
  std::vector<Real> input;  // concatenated embedding after dropout
  std::vector<Real> mask;
};

// local_emb may be empty (global-only baseline).
template <class Real>
ClassifierOutput<Real> classify(const ClassifierParams<Real>& params, std::span<const Real> global_emb,
                                std::span<const Real> local_emb, ForwardMode mode, Rng& rng);

// Gradient of -log probs[label]. Accumulates into grads; grad_input has the
// classifier input size.
template <class Real>
void classify_backward(const ClassifierParams<Real>& params, const ClassifierOutput<Real>& out, int label,
                       ClassifierParams<Real>& grads, std::span<Real> grad_input);

// ---------------------------------------------------------------------------
// Full model

template <class Real>
struct GlassForward {
  std::array<Real, 2> probs{};
  std::array<Real, 2> logits{};
  GridPlan plan;
  std::vector<CropRect> rects;
  std::vector<Real> attention_weights;
  std::vector<Real> global_emb;
  std::vector<Real> local_emb;
};

// Resize to 224 for the global branch, sample n crops for the local branch,
// aggregate, classify. Random draws from `rng`, in order: crop positions,
// attention dropout, classifier dropout.
template <class Real>
GlassForward<Real> glass_forward(const GlassParams<Real>& model, const ImageBuf& img, int n, Rng& rng,
                                 ForwardMode mode = {});

// Same composition with the views supplied by the caller: a 224x224 global
// view and any number of 224x224 crops.
template <class Real>
GlassForward<Real> glass_forward_views(const GlassParams<Real>& model, const ImageBuf& global_view,
                                       const std::vector<ImageBuf>& crops, Rng& rng, ForwardMode mode = {});

struct Example {
  const ImageBuf* image = nullptr;
  int label = 0;  // 0 = real, 1 = fake
};

template <class Real>
struct LossAndGrads {
  double loss = 0.0;  // mean cross-entropy over the batch
  GlassParams<Real> grads;
  std::vector<std::array<Real, 2>> probs;  // per example
};

// Mean cross-entropy and its gradient for every parameter. Each example gets
// its own stream Rng(s_i), where s_i are drawn from `rng` in batch order, so
// the crop positions and dropout masks (held fixed, not differentiated) and
// the reduced gradient do not depend on the thread count.
template <class Real>
LossAndGrads<Real> loss_and_grads(const GlassParams<Real>& model, std::span<const Example> batch, int n, Rng& rng,
                                  ForwardMode mode);

// Activation elements held for backward by one batch: affine in n.
std::int64_t activation_elements(const ArchConfig& arch, int n, int batch_size);

// ---------------------------------------------------------------------------

template <class Real>
template <class F>
void GlassParams<Real>::for_each(F&& f) {
  auto backbone = [&](const char* prefix, ParamGroup g, BackboneParams<Real>& b) {
    int cin = 3;
    for (std::size_t i = 0; i < b.conv_weight.size(); ++i) {
      const int cout = arch.channels[i];
      const std::string base = std::string(prefix) + ".conv" + std::to_string(i);
      f(base + ".weight", g, std::vector<int>{cout, cin, 3, 3}, std::span<Real>(b.conv_weight[i]));
      f(base + ".bias", g, std::vector<int>{cout}, std::span<Real>(b.conv_bias[i]));
      cin = cout;
    }
    f(std::string(prefix) + ".proj.weight", g, std::vector<int>{arch.embed_dim, cin}, std::span<Real>(b.proj_weight));
    f(std::string(prefix) + ".proj.bias", g, std::vector<int>{arch.embed_dim}, std::span<Real>(b.proj_bias));
  };
  backbone("global", ParamGroup::GlobalBackbone, global_backbone);
  if (!arch.global_only) {
    backbone("local", ParamGroup::LocalBackbone, local_backbone);
    f(std::string("attention.w1"), ParamGroup::Head, std::vector<int>{arch.attn_hidden, arch.embed_dim},
      std::span<Real>(attention.w1));
    f(std::string("attention.b1"), ParamGroup::Head, std::vector<int>{arch.attn_hidden}, std::span<Real>(attention.b1));
    f(std::string("attention.w2"), ParamGroup::Head, std::vector<int>{arch.attn_hidden}, std::span<Real>(attention.w2));
  }
  f(std::string("classifier.weight"), ParamGroup::Head, std::vector<int>{2, arch.classifier_inputs()},
    std::span<Real>(classifier.weight));
  f(std::string("classifier.bias"), ParamGroup::Head, std::vector<int>{2}, std::span<Real>(classifier.bias));
}

template <class Real>
template <class F>
void GlassParams<Real>::for_each(F&& f) const {
  const_cast<GlassParams*>(this)->for_each(
      [&](const std::string& name, ParamGroup g, const std::vector<int>& shape, std::span<Real> s) {
        f(name, g, shape, std::span<const Real>(s));
      });
}

template <class Real>
template <class Other>
GlassParams<Other> GlassParams<Real>::cast() const {
  auto out = GlassParams<Other>::zeros(arch);
  std::vector<std::span<const Real>> src;
  for_each([&](const std::string&, ParamGroup, const std::vector<int>&, std::span<const Real> s) { src.push_back(s); });
  std::size_t i = 0;
  out.for_each([&](const std::string&, ParamGroup, const std::vector<int>&, std::span<Other> d) {
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = static_cast<Other>(src[i][k]);
    ++i;
  });
  return out;
}

}  // namespace glass
