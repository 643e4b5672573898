#include "glass/model.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "glass/errors.hpp"
#include "glass/kernels.hpp"

namespace glass {
namespace {

template <class Real>
std::vector<Real> to_real(const ImageBuf& img) {
  return std::vector<Real>(img.data.begin(), img.data.end());
}

template <class Real>
void fill_normal(std::vector<Real>& v, Rng& rng, double stddev) {
  for (auto& x : v) x = static_cast<Real>(rng.normal() * stddev);
}

template <class Real>
BackboneParams<Real> zero_backbone(const ArchConfig& arch) {
  BackboneParams<Real> b;
  int cin = 3;
  for (int cout : arch.channels) {
    b.conv_weight.emplace_back(static_cast<std::size_t>(cout) * cin * 9, Real(0));
    b.conv_bias.emplace_back(static_cast<std::size_t>(cout), Real(0));
    cin = cout;
  }
  b.proj_weight.assign(static_cast<std::size_t>(arch.embed_dim) * cin, Real(0));
  b.proj_bias.assign(static_cast<std::size_t>(arch.embed_dim), Real(0));
  return b;
}

template <class Real>
void init_backbone(BackboneParams<Real>& b, const ArchConfig& arch, Rng& rng) {
  int cin = 3;
  for (std::size_t i = 0; i < arch.channels.size(); ++i) {
    fill_normal(b.conv_weight[i], rng, std::sqrt(2.0 / (cin * 9)));
    cin = arch.channels[i];
  }
  fill_normal(b.proj_weight, rng, std::sqrt(1.0 / cin));
}

void check_image_224(const ImageBuf& img) {
  if (img.height != kCropSide || img.width != kCropSide || img.size() != 3u * kCropSide * kCropSide) {
    throw ShapeError("backbone input must be 3x224x224, got 3x" + std::to_string(img.height) + "x" +
                     std::to_string(img.width));
  }
}

}  // namespace

const char* to_string(ParamGroup g) {
  switch (g) {
    case ParamGroup::GlobalBackbone: return "global";
    case ParamGroup::LocalBackbone: return "local";
    case ParamGroup::Head: return "head";
  }
  return "?";
}

void ArchConfig::validate() const {
  if (embed_dim < 1) throw ConfigError("embed_dim must be positive");
  if (attn_hidden < 1) throw ConfigError("attn_hidden must be positive");
  if (channels.empty() || channels.size() > 7) throw ConfigError("between 1 and 7 conv blocks are supported");
  for (int c : channels) {
    if (c < 1) throw ConfigError("channel widths must be positive");
  }
}

// ---------------------------------------------------------------------------
// GlassParams

template <class Real>
GlassParams<Real> GlassParams<Real>::zeros(const ArchConfig& arch) {
  arch.validate();
  GlassParams p;
  p.arch = arch;
  p.global_backbone = zero_backbone<Real>(arch);
  if (!arch.global_only) {
    p.local_backbone = zero_backbone<Real>(arch);
    p.attention.w1.assign(static_cast<std::size_t>(arch.attn_hidden) * arch.embed_dim, Real(0));
    p.attention.b1.assign(static_cast<std::size_t>(arch.attn_hidden), Real(0));
    p.attention.w2.assign(static_cast<std::size_t>(arch.attn_hidden), Real(0));
  }
  p.classifier.weight.assign(2 * static_cast<std::size_t>(arch.classifier_inputs()), Real(0));
  p.classifier.bias.assign(2, Real(0));
  return p;
}

template <class Real>
std::size_t GlassParams<Real>::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const std::string&, ParamGroup, const std::vector<int>&, std::span<const Real> s) { n += s.size(); });
  return n;
}

template <class Real>
void GlassParams<Real>::fill(Real v) {
  for_each([&](const std::string&, ParamGroup, const std::vector<int>&, std::span<Real> s) {
    std::fill(s.begin(), s.end(), v);
  });
}

template <class Real>
void GlassParams<Real>::add(const GlassParams& other) {
  std::vector<std::span<const Real>> src;
  other.for_each([&](const std::string&, ParamGroup, const std::vector<int>&, std::span<const Real> s) {
    src.push_back(s);
  });
  std::size_t i = 0;
  for_each([&](const std::string& name, ParamGroup, const std::vector<int>&, std::span<Real> d) {
    if (i >= src.size() || src[i].size() != d.size()) throw ShapeError("parameter mismatch at " + name);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] += src[i][k];
    ++i;
  });
}

template <class Real>
void GlassParams<Real>::scale(Real s) {
  for_each([&](const std::string&, ParamGroup, const std::vector<int>&, std::span<Real> d) {
    for (auto& x : d) x *= s;
  });
}

template <class Real>
GlassParams<Real> init_params(const ArchConfig& arch, std::uint64_t seed) {
  auto p = GlassParams<Real>::zeros(arch);
  Rng global_rng(Rng::derive(seed, 1));
  init_backbone(p.global_backbone, arch, global_rng);
  Rng head_rng(Rng::derive(seed, 3));
  if (!arch.global_only) {
    Rng local_rng(Rng::derive(seed, 2));
    init_backbone(p.local_backbone, arch, local_rng);
    fill_normal(p.attention.w1, head_rng, std::sqrt(1.0 / arch.embed_dim));
    fill_normal(p.attention.w2, head_rng, std::sqrt(1.0 / arch.attn_hidden));
  }
  fill_normal(p.classifier.weight, head_rng, 0.01);
  return p;
}

// ---------------------------------------------------------------------------
// Backbone

template <class Real>
std::vector<Real> backbone_forward(const BackboneParams<Real>& params, const ArchConfig& arch,
                                   std::span<const Real> pixels, int h, int w, BackboneCache<Real>* cache) {
  const int blocks = static_cast<int>(arch.channels.size());
  if (pixels.size() != 3u * static_cast<std::size_t>(h) * w) throw ShapeError("backbone input size mismatch");
  if ((h >> blocks) < 1 || (w >> blocks) < 1) throw ShapeError("backbone input too small for the pooling depth");
  if (cache) {
    cache->height = h;
    cache->width = w;
    cache->inputs.clear();
    cache->activations.clear();
  }

  std::vector<Real> x(pixels.size());
  const Real mean = static_cast<Real>(kPixelMean);
  const Real inv_std = static_cast<Real>(1.0 / kPixelStd);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (pixels[i] - mean) * inv_std;
  int cin = 3;
  for (int b = 0; b < blocks; ++b) {
    const int cout = arch.channels[b];
    std::vector<Real> act(static_cast<std::size_t>(cout) * h * w);
    kernels::conv3x3_forward<Real>(x, cin, h, w, params.conv_weight[b], params.conv_bias[b], cout, act);
    kernels::relu_inplace<Real>(act);
    std::vector<Real> pooled(static_cast<std::size_t>(cout) * (h / 2) * (w / 2));
    kernels::avgpool2_forward<Real>(act, cout, h, w, pooled);
    if (cache) {
      cache->inputs.push_back(std::move(x));
      cache->activations.push_back(std::move(act));
    }
    x = std::move(pooled);
    cin = cout;
    h /= 2;
    w /= 2;
  }

  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::vector<Real> gap(static_cast<std::size_t>(cin));
  for (int c = 0; c < cin; ++c) {
    Real s = 0;
    for (std::size_t i = 0; i < plane; ++i) s += x[c * plane + i];
    gap[c] = s / static_cast<Real>(plane);
  }

  const int d_out = arch.embed_dim;
  std::vector<Real> emb(params.proj_bias.begin(), params.proj_bias.end());
  for (int d = 0; d < d_out; ++d) {
    const Real* row = params.proj_weight.data() + static_cast<std::size_t>(d) * cin;
    Real s = 0;
    for (int c = 0; c < cin; ++c) s += row[c] * gap[c];
    emb[d] += s;
  }
  if (cache) cache->pooled = std::move(gap);
  return emb;
}

template <class Real>
std::vector<Real> backbone_forward(const BackboneParams<Real>& params, const ArchConfig& arch, const ImageBuf& img) {
  check_image_224(img);
  const auto px = to_real<Real>(img);
  return backbone_forward<Real>(params, arch, px, img.height, img.width, nullptr);
}

template <class Real>
void backbone_backward(const BackboneParams<Real>& params, const ArchConfig& arch, const BackboneCache<Real>& cache,
                       std::span<const Real> grad_embedding, BackboneParams<Real>& grads) {
  const int blocks = static_cast<int>(arch.channels.size());
  std::vector<int> hs(blocks + 1), ws(blocks + 1);
  hs[0] = cache.height;
  ws[0] = cache.width;
  for (int b = 0; b < blocks; ++b) {
    hs[b + 1] = hs[b] / 2;
    ws[b + 1] = ws[b] / 2;
  }
  const int c_last = arch.channels.back();
  const int d_out = arch.embed_dim;

  std::vector<Real> dgap(static_cast<std::size_t>(c_last), Real(0));
  for (int d = 0; d < d_out; ++d) {
    const Real g = grad_embedding[d];
    grads.proj_bias[d] += g;
    Real* grow = grads.proj_weight.data() + static_cast<std::size_t>(d) * c_last;
    const Real* wrow = params.proj_weight.data() + static_cast<std::size_t>(d) * c_last;
    for (int c = 0; c < c_last; ++c) {
      grow[c] += g * cache.pooled[c];
      dgap[c] += wrow[c] * g;
    }
  }

  const std::size_t plane = static_cast<std::size_t>(hs[blocks]) * ws[blocks];
  std::vector<Real> dx(static_cast<std::size_t>(c_last) * plane);
  for (int c = 0; c < c_last; ++c) {
    std::fill_n(dx.begin() + c * plane, plane, dgap[c] / static_cast<Real>(plane));
  }

  for (int b = blocks - 1; b >= 0; --b) {
    const int cout = arch.channels[b];
    const int cin = b == 0 ? 3 : arch.channels[b - 1];
    std::vector<Real> dact(static_cast<std::size_t>(cout) * hs[b] * ws[b]);
    kernels::avgpool2_backward<Real>(dx, cout, hs[b], ws[b], dact);
    kernels::relu_backward<Real>(cache.activations[b], dact);
    std::vector<Real> dinput;
    if (b > 0) dinput.resize(static_cast<std::size_t>(cin) * hs[b] * ws[b]);
    kernels::conv3x3_backward<Real>(cache.inputs[b], cin, hs[b], ws[b], params.conv_weight[b], cout, dact,
                                    grads.conv_weight[b], grads.conv_bias[b], dinput);
    dx = std::move(dinput);
  }
}

// ---------------------------------------------------------------------------
// Attention

template <class Real>
AttentionOutput<Real> attention_aggregate(const AttentionParams<Real>& params, int embed_dim,
                                          std::span<const Real> embeddings, ForwardMode mode, Rng& rng) {
  const auto d_in = static_cast<std::size_t>(embed_dim);
  if (embeddings.empty()) throw ShapeError("attention needs at least one embedding");
  if (embeddings.size() % d_in != 0) throw ShapeError("embedding length is not a multiple of D");
  const std::size_t k_hidden = params.b1.size();
  if (params.w1.size() != k_hidden * d_in || params.w2.size() != k_hidden) {
    throw ShapeError("attention parameters do not match embedding dimension");
  }
  const std::size_t n = embeddings.size() / d_in;

  AttentionOutput<Real> out;
  out.hidden.resize(n * k_hidden);
  out.mask.assign(n * k_hidden, Real(1));
  out.scores.assign(n, Real(0));
  const bool drop = mode.train && mode.dropout > 0.0;
  const double keep = 1.0 - mode.dropout;
  const Real inv_keep = drop ? static_cast<Real>(1.0 / keep) : Real(1);

  for (std::size_t i = 0; i < n; ++i) {
    const Real* h = embeddings.data() + i * d_in;
    Real score = 0;
    for (std::size_t k = 0; k < k_hidden; ++k) {
      const Real* wrow = params.w1.data() + k * d_in;
      Real z = params.b1[k];
      for (std::size_t d = 0; d < d_in; ++d) z += wrow[d] * h[d];
      const Real t = std::tanh(z);
      out.hidden[i * k_hidden + k] = t;
      if (drop) out.mask[i * k_hidden + k] = rng.bernoulli(keep) ? inv_keep : Real(0);
      score += params.w2[k] * out.mask[i * k_hidden + k] * t;
    }
    out.scores[i] = score;
  }

  out.weights = out.scores;
  softmax_inplace<Real>(out.weights);
  out.aggregate.assign(d_in, Real(0));
  for (std::size_t i = 0; i < n; ++i) {
    const Real a = out.weights[i];
    const Real* h = embeddings.data() + i * d_in;
    for (std::size_t d = 0; d < d_in; ++d) out.aggregate[d] += a * h[d];
  }
  return out;
}

template <class Real>
void attention_backward(const AttentionParams<Real>& params, int embed_dim, std::span<const Real> embeddings,
                        const AttentionOutput<Real>& out, std::span<const Real> grad_aggregate,
                        AttentionParams<Real>& grads, std::span<Real> grad_embeddings) {
  const auto d_in = static_cast<std::size_t>(embed_dim);
  const std::size_t n = out.weights.size();
  const std::size_t k_hidden = params.b1.size();

  std::vector<Real> dweight(n);
  Real weighted = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Real* h = embeddings.data() + i * d_in;
    Real* gh = grad_embeddings.data() + i * d_in;
    Real s = 0;
    for (std::size_t d = 0; d < d_in; ++d) {
      s += grad_aggregate[d] * h[d];
      gh[d] = out.weights[i] * grad_aggregate[d];
    }
    dweight[i] = s;
    weighted += out.weights[i] * s;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Real dscore = out.weights[i] * (dweight[i] - weighted);
    const Real* h = embeddings.data() + i * d_in;
    Real* gh = grad_embeddings.data() + i * d_in;
    for (std::size_t k = 0; k < k_hidden; ++k) {
      const Real t = out.hidden[i * k_hidden + k];
      const Real m = out.mask[i * k_hidden + k];
      grads.w2[k] += dscore * m * t;
      const Real dz = dscore * params.w2[k] * m * (Real(1) - t * t);
      grads.b1[k] += dz;
      Real* gw = grads.w1.data() + k * d_in;
      const Real* wrow = params.w1.data() + k * d_in;
      for (std::size_t d = 0; d < d_in; ++d) {
        gw[d] += dz * h[d];
        gh[d] += wrow[d] * dz;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Classifier

template <class Real>
ClassifierOutput<Real> classify(const ClassifierParams<Real>& params, std::span<const Real> global_emb,
                                std::span<const Real> local_emb, ForwardMode mode, Rng& rng) {
  const std::size_t inputs = global_emb.size() + local_emb.size();
  if (params.weight.size() != 2 * inputs || params.bias.size() != 2) {
    throw ShapeError("classifier expects " + std::to_string(params.weight.size() / 2) + " inputs, got " +
                     std::to_string(inputs));
  }
  ClassifierOutput<Real> out;
  out.input.reserve(inputs);
  out.input.insert(out.input.end(), global_emb.begin(), global_emb.end());
  out.input.insert(out.input.end(), local_emb.begin(), local_emb.end());
  out.mask.assign(inputs, Real(1));
  if (mode.train && mode.dropout > 0.0) {
    const double keep = 1.0 - mode.dropout;
    const auto inv_keep = static_cast<Real>(1.0 / keep);
    for (std::size_t k = 0; k < inputs; ++k) {
      out.mask[k] = rng.bernoulli(keep) ? inv_keep : Real(0);
      out.input[k] *= out.mask[k];
    }
  }
  for (int j = 0; j < 2; ++j) {
    Real s = params.bias[j];
    const Real* row = params.weight.data() + j * inputs;
    for (std::size_t k = 0; k < inputs; ++k) s += row[k] * out.input[k];
    out.logits[j] = s;
  }
  out.probs = out.logits;
  softmax_inplace<Real>(out.probs);
  return out;
}

template <class Real>
void classify_backward(const ClassifierParams<Real>& params, const ClassifierOutput<Real>& out, int label,
                       ClassifierParams<Real>& grads, std::span<Real> grad_input) {
  const std::size_t inputs = out.input.size();
  std::array<Real, 2> dlogit = {out.probs[0], out.probs[1]};
  dlogit[label] -= Real(1);
  std::fill(grad_input.begin(), grad_input.end(), Real(0));
  for (int j = 0; j < 2; ++j) {
    grads.bias[j] += dlogit[j];
    Real* grow = grads.weight.data() + j * inputs;
    const Real* wrow = params.weight.data() + j * inputs;
    for (std::size_t k = 0; k < inputs; ++k) {
      grow[k] += dlogit[j] * out.input[k];
      grad_input[k] += wrow[k] * dlogit[j];
    }
  }
  for (std::size_t k = 0; k < inputs; ++k) grad_input[k] *= out.mask[k];
}

// ---------------------------------------------------------------------------
// Full model

template <class Real>
GlassForward<Real> glass_forward_views(const GlassParams<Real>& model, const ImageBuf& global_view,
                                       const std::vector<ImageBuf>& crops, Rng& rng, ForwardMode mode) {
  const ArchConfig& arch = model.arch;
  GlassForward<Real> out;
  out.global_emb = backbone_forward<Real>(model.global_backbone, arch, global_view);
  ClassifierOutput<Real> cls;
  if (arch.global_only) {
    cls = classify<Real>(model.classifier, out.global_emb, {}, mode, rng);
  } else {
    if (crops.empty()) throw ShapeError("the local branch needs at least one crop");
    std::vector<Real> embeddings;
    embeddings.reserve(crops.size() * arch.embed_dim);
    for (const auto& crop : crops) {
      const auto e = backbone_forward<Real>(model.local_backbone, arch, crop);
      embeddings.insert(embeddings.end(), e.begin(), e.end());
    }
    auto att = attention_aggregate<Real>(model.attention, arch.embed_dim, embeddings, mode, rng);
    out.attention_weights = std::move(att.weights);
    out.local_emb = std::move(att.aggregate);
    cls = classify<Real>(model.classifier, out.global_emb, out.local_emb, mode, rng);
  }
  out.logits = cls.logits;
  out.probs = cls.probs;
  return out;
}

template <class Real>
GlassForward<Real> glass_forward(const GlassParams<Real>& model, const ImageBuf& img, int n, Rng& rng,
                                 ForwardMode mode) {
  require_min_size(img);
  const ImageBuf global_view = resize_bilinear(img, kCropSide, kCropSide);
  if (model.arch.global_only) return glass_forward_views(model, global_view, {}, rng, mode);
  auto sample = sample_crops(img, n, rng);
  auto out = glass_forward_views(model, global_view, sample.crops, rng, mode);
  out.plan = sample.plan;
  out.rects = std::move(sample.rects);
  return out;
}

namespace {

template <class Real>
double example_loss_grad(const GlassParams<Real>& model, const ImageBuf& img, int label, int n, Rng& rng,
                         ForwardMode mode, GlassParams<Real>& grads, std::array<Real, 2>& probs) {
  const ArchConfig& arch = model.arch;
  require_min_size(img);
  if (label != 0 && label != 1) throw ConfigError("labels must be 0 (real) or 1 (fake)");

  const auto global_px = to_real<Real>(resize_bilinear(img, kCropSide, kCropSide));
  BackboneCache<Real> global_cache;
  const auto global_emb =
      backbone_forward<Real>(model.global_backbone, arch, global_px, kCropSide, kCropSide, &global_cache);

  std::vector<BackboneCache<Real>> local_caches;
  std::vector<Real> embeddings;
  AttentionOutput<Real> att;
  if (!arch.global_only) {
    const auto sample = sample_crops(img, n, rng);
    local_caches.resize(sample.crops.size());
    for (std::size_t i = 0; i < sample.crops.size(); ++i) {
      const auto px = to_real<Real>(sample.crops[i]);
      const auto e = backbone_forward<Real>(model.local_backbone, arch, px, kCropSide, kCropSide, &local_caches[i]);
      embeddings.insert(embeddings.end(), e.begin(), e.end());
    }
    att = attention_aggregate<Real>(model.attention, arch.embed_dim, embeddings, mode, rng);
  }

  const auto cls = classify<Real>(model.classifier, global_emb, std::span<const Real>(att.aggregate), mode, rng);
  probs = cls.probs;
  const double l0 = cls.logits[0];
  const double l1 = cls.logits[1];
  const double mx = std::max(l0, l1);
  const double lse = mx + std::log(std::exp(l0 - mx) + std::exp(l1 - mx));
  const double loss = lse - (label == 0 ? l0 : l1);

  std::vector<Real> grad_input(static_cast<std::size_t>(arch.classifier_inputs()));
  classify_backward<Real>(model.classifier, cls, label, grads.classifier, grad_input);
  const std::span<const Real> grad_all(grad_input);
  const auto d = static_cast<std::size_t>(arch.embed_dim);

  if (!arch.global_only) {
    std::vector<Real> grad_emb(embeddings.size());
    attention_backward<Real>(model.attention, arch.embed_dim, embeddings, att, grad_all.subspan(d, d), grads.attention,
                             grad_emb);
    for (std::size_t i = 0; i < local_caches.size(); ++i) {
      backbone_backward<Real>(model.local_backbone, arch, local_caches[i],
                              std::span<const Real>(grad_emb).subspan(i * d, d), grads.local_backbone);
    }
  }
  backbone_backward<Real>(model.global_backbone, arch, global_cache, grad_all.subspan(0, d), grads.global_backbone);
  return loss;
}

}  // namespace

template <class Real>
LossAndGrads<Real> loss_and_grads(const GlassParams<Real>& model, std::span<const Example> batch, int n, Rng& rng,
                                  ForwardMode mode) {
  if (batch.empty()) throw ConfigError("empty batch");
  const auto count = static_cast<std::ptrdiff_t>(batch.size());
  std::vector<std::uint64_t> seeds(batch.size());
  for (auto& s : seeds) s = rng.next_u64();

  std::vector<GlassParams<Real>> per_example(batch.size());
  std::vector<double> losses(batch.size(), 0.0);
  LossAndGrads<Real> out;
  out.probs.resize(batch.size());
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      per_example[i] = GlassParams<Real>::zeros(model.arch);
      Rng example_rng(seeds[i]);
      losses[i] = example_loss_grad(model, *batch[i].image, batch[i].label, n, example_rng, mode, per_example[i],
                                    out.probs[i]);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  out.grads = GlassParams<Real>::zeros(model.arch);
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    out.grads.add(per_example[i]);
    out.loss += losses[i];
  }
  out.grads.scale(Real(1) / static_cast<Real>(count));
  out.loss /= static_cast<double>(count);
  return out;
}

std::int64_t activation_elements(const ArchConfig& arch, int n, int batch_size) {
  std::int64_t per_view = 0;
  std::int64_t h = kCropSide;
  std::int64_t w = kCropSide;
  std::int64_t cin = 3;
  for (int cout : arch.channels) {
    per_view += cin * h * w;   // block input
    per_view += cout * h * w;  // conv + ReLU output
    cin = cout;
    h /= 2;
    w /= 2;
  }
  per_view += cin + arch.embed_dim;  // pooled features, embedding

  std::int64_t per_image = per_view;  // global view
  if (!arch.global_only) {
    per_image += static_cast<std::int64_t>(n) * per_view;
    per_image += static_cast<std::int64_t>(n) * (2 * arch.attn_hidden + 2);  // hidden, mask, score, weight
    per_image += arch.embed_dim;                                             // aggregate
  }
  per_image += 2 * arch.classifier_inputs() + 4;  // input, mask, logits, probs
  return per_image * batch_size;
}

// ---------------------------------------------------------------------------

#define GLASS_INSTANTIATE(Real)                                                                                     \
  template struct GlassParams<Real>;                                                                               \
  template GlassParams<Real> init_params<Real>(const ArchConfig&, std::uint64_t);                                  \
  template std::vector<Real> backbone_forward<Real>(const BackboneParams<Real>&, const ArchConfig&,                 \
                                                    std::span<const Real>, int, int, BackboneCache<Real>*);        \
  template std::vector<Real> backbone_forward<Real>(const BackboneParams<Real>&, const ArchConfig&, const ImageBuf&); \
  template void backbone_backward<Real>(const BackboneParams<Real>&, const ArchConfig&, const BackboneCache<Real>&, \
                                        std::span<const Real>, BackboneParams<Real>&);                             \
  template AttentionOutput<Real> attention_aggregate<Real>(const AttentionParams<Real>&, int, std::span<const Real>, \
                                                           ForwardMode, Rng&);                                     \
  template void attention_backward<Real>(const AttentionParams<Real>&, int, std::span<const Real>,                 \
                                         const AttentionOutput<Real>&, std::span<const Real>, AttentionParams<Real>&, \
                                         std::span<Real>);                                                         \
  template ClassifierOutput<Real> classify<Real>(const ClassifierParams<Real>&, std::span<const Real>,             \
                                                 std::span<const Real>, ForwardMode, Rng&);                        \
  template void classify_backward<Real>(const ClassifierParams<Real>&, const ClassifierOutput<Real>&, int,         \
                                        ClassifierParams<Real>&, std::span<Real>);                                 \
  template GlassForward<Real> glass_forward_views<Real>(const GlassParams<Real>&, const ImageBuf&,                 \
                                                        const std::vector<ImageBuf>&, Rng&, ForwardMode);          \
  template GlassForward<Real> glass_forward<Real>(const GlassParams<Real>&, const ImageBuf&, int, Rng&, ForwardMode); \
  template LossAndGrads<Real> loss_and_grads<Real>(const GlassParams<Real>&, std::span<const Example>, int, Rng&,   \
                                                   ForwardMode);

GLASS_INSTANTIATE(float)
GLASS_INSTANTIATE(double)
#undef GLASS_INSTANTIATE

}  // namespace glass
