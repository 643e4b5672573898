#include "glass/optimizer.hpp"

#include <cmath>

#include "glass/errors.hpp"

namespace glass {

void adamw_update(std::span<float> w, std::span<const float> g, std::span<float> m, std::span<float> v, int t,
                  const AdamWSettings& group, const AdamWHyper& hyper) {
  const double bc1 = 1.0 - std::pow(hyper.beta1, t);
  const double bc2 = 1.0 - std::pow(hyper.beta2, t);
  const double decay = 1.0 - group.lr * group.weight_decay;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double gi = g[i];
    const double mi = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * gi;
    const double vi = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * gi * gi;
    m[i] = static_cast<float>(mi);
    v[i] = static_cast<float>(vi);
    const double step = group.lr * (mi / bc1) / (std::sqrt(vi / bc2) + hyper.eps);
    w[i] = static_cast<float>(w[i] * decay - step);
  }
}

AdamW::AdamW(const GlassParams<float>& model, const std::array<AdamWSettings, 3>& groups, const AdamWHyper& hyper)
    : groups_(groups),
      hyper_(hyper),
      m_(GlassParams<float>::zeros(model.arch)),
      v_(GlassParams<float>::zeros(model.arch)) {}

void AdamW::step(GlassParams<float>& model, const GlassParams<float>& grads) {
  ++t_;
  std::vector<std::span<const float>> g;
  std::vector<std::span<float>> m, v;
  grads.for_each([&](const std::string&, ParamGroup, const std::vector<int>&, std::span<const float> s) { g.push_back(s); });
  m_.for_each([&](const std::string&, ParamGroup, const std::vector<int>&, std::span<float> s) { m.push_back(s); });
  v_.for_each([&](const std::string&, ParamGroup, const std::vector<int>&, std::span<float> s) { v.push_back(s); });
  std::size_t i = 0;
  model.for_each([&](const std::string& name, ParamGroup group, const std::vector<int>&, std::span<float> w) {
    if (i >= g.size() || g[i].size() != w.size() || m[i].size() != w.size()) {
      throw ShapeError("optimizer state does not match parameter " + name);
    }
    adamw_update(w, g[i], m[i], v[i], t_, groups_[static_cast<int>(group)], hyper_);
    ++i;
  });
}

AdamW make_optimizer(const TrainConfig& config, const GlassParams<float>& model) {
  config.validate();
  std::array<AdamWSettings, 3> groups{};
  groups[static_cast<int>(ParamGroup::GlobalBackbone)] = {config.lr_global, config.wd_global};
  groups[static_cast<int>(ParamGroup::LocalBackbone)] = {config.lr_local, config.wd_local};
  groups[static_cast<int>(ParamGroup::Head)] = {config.lr_head, 0.0};
  return AdamW(model, groups);
}

}  // namespace glass
