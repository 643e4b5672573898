#pragma once

#include <array>
#include <span>

#include "glass/config.hpp"
#include "glass/model.hpp"

namespace glass {

struct AdamWSettings {
  double lr = 1e-3;
  double weight_decay = 0.0;
};

struct AdamWHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One decoupled-weight-decay Adam update of a flat tensor at step t (1-based):
//   w <- w * (1 - lr * wd)
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
//   w <- w - lr * m_hat / (sqrt(v_hat) + eps)
void adamw_update(std::span<float> w, std::span<const float> g, std::span<float> m, std::span<float> v, int t,
                  const AdamWSettings& group, const AdamWHyper& hyper = {});

// Three parameter groups: global backbone, local backbone, and
// attention + classifier (no weight decay).
class AdamW {
 public:
  AdamW(const GlassParams<float>& model, const std::array<AdamWSettings, 3>& groups, const AdamWHyper& hyper = {});

  void step(GlassParams<float>& model, const GlassParams<float>& grads);

  const AdamWSettings& group(ParamGroup g) const { return groups_[static_cast<int>(g)]; }
  int steps() const { return t_; }

 private:
  std::array<AdamWSettings, 3> groups_;
  AdamWHyper hyper_;
  GlassParams<float> m_;
  GlassParams<float> v_;
  int t_ = 0;
};

AdamW make_optimizer(const TrainConfig& config, const GlassParams<float>& model);

}  // namespace glass
