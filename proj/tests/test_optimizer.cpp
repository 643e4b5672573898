#include <doctest.h>

#include <cmath>
#include <vector>

#include "glass/config.hpp"
#include "glass/errors.hpp"
#include "glass/optimizer.hpp"
#include "oracles.hpp"

using namespace glass;

TEST_CASE("reference preset maps to three parameter groups") {
  const auto cfg = vit_reference_preset();
  const auto model = init_params<float>(oracle::tiny_arch(), 1);
  const auto opt = make_optimizer(cfg, model);
  CHECK(opt.group(ParamGroup::GlobalBackbone).lr == 1.58e-5);
  CHECK(opt.group(ParamGroup::GlobalBackbone).weight_decay == 3.18e-5);
  CHECK(opt.group(ParamGroup::LocalBackbone).lr == 4.26e-5);
  CHECK(opt.group(ParamGroup::LocalBackbone).weight_decay == 6.14e-6);
  CHECK(opt.group(ParamGroup::Head).lr == 6.48e-5);
  CHECK(opt.group(ParamGroup::Head).weight_decay == 0.0);
  CHECK(cfg.dropout_rate == 0.3);
  CHECK(cfg.batch_size == 64);
  CHECK(cfg.n_crops == 10);
}

TEST_CASE("zero gradient: decoupled decay only") {
  std::vector<float> w = {2.0f, -4.0f}, g = {0.0f, 0.0f}, m = {0, 0}, v = {0, 0};
  const AdamWSettings s{0.1, 0.5};
  adamw_update(w, g, m, v, 1, s);
  CHECK(w[0] == doctest::Approx(2.0 * (1 - 0.1 * 0.5)));
  CHECK(w[1] == doctest::Approx(-4.0 * (1 - 0.1 * 0.5)));
  adamw_update(w, g, m, v, 2, s);
  CHECK(w[0] == doctest::Approx(2.0 * 0.95 * 0.95));
}

TEST_CASE("first step moves by -lr * sign(g)") {
  // At t = 1 the bias-corrected moments are g and g^2, so the step is
  // lr * g / (|g| + eps).
  for (float g0 : {3.0f, -0.02f, 1e-3f}) {
    std::vector<float> w = {1.0f}, g = {g0}, m = {0}, v = {0};
    adamw_update(w, g, m, v, 1, {0.01, 0.0});
    const double expected = 1.0 - 0.01 * g0 / (std::abs(g0) + 1e-8);
    CHECK(w[0] == doctest::Approx(expected).epsilon(1e-6));
    CHECK((w[0] < 1.0f) == (g0 > 0));
    CHECK(m[0] == doctest::Approx(0.1 * g0));
    CHECK(v[0] == doctest::Approx(0.001 * g0 * g0));
  }
}

TEST_CASE("weight decay touches only its own group") {
  TrainConfig cfg;
  cfg.lr_global = cfg.lr_local = cfg.lr_head = 0.1;
  cfg.wd_global = 0.5;
  cfg.wd_local = 0.0;
  auto model = init_params<float>(oracle::tiny_arch(), 2);
  model.fill(1.0f);
  const auto before = model;
  auto opt = make_optimizer(cfg, model);
  const auto zero = GlassParams<float>::zeros(model.arch);
  opt.step(model, zero);
  CHECK(opt.steps() == 1);
  std::vector<std::span<const float>> old;
  before.for_each([&](const std::string&, ParamGroup, const std::vector<int>&, std::span<const float> s) {
    old.push_back(s);
  });
  std::size_t i = 0;
  model.for_each([&](const std::string& name, ParamGroup group, const std::vector<int>&, std::span<const float> s) {
    const bool changed = s[0] != old[i][0];
    INFO(name);
    CHECK(changed == (group == ParamGroup::GlobalBackbone));
    if (changed) CHECK(s[0] == doctest::Approx(0.95f));
    ++i;
  });
}

TEST_CASE("invalid configs are rejected") {
  TrainConfig cfg;
  cfg.lr_head = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.dropout_rate = 0.6;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.n_crops = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.wd_local = -1;
  CHECK_THROWS_AS(make_optimizer(cfg, init_params<float>(oracle::tiny_arch(), 1)), ConfigError);
}
