#include "doctest.h"

#include "adaskip/datagen.hpp"
#include "adaskip/error.hpp"
#include "adaskip/stochdepth.hpp"
#include "test_support.hpp"

using namespace adaskip;
namespace t = adaskip::testing;

TEST_CASE("survival probability closed form") {
  CHECK(survival_probability(54, 54, 0.2) == 0.2);
  CHECK(survival_probability(1, 54, 0.2) == doctest::Approx(0.98519).epsilon(1e-5));
  for (std::size_t L : {1u, 7u, 54u}) {
    CHECK(survival_probability(L, L, 1.0) == 1.0);
  }
  CHECK_THROWS_AS(survival_probability(0, 5, 0.5), ValidationError);
  CHECK_THROWS_AS(survival_probability(6, 5, 0.5), ValidationError);
  CHECK_THROWS_AS(survival_probability(1, 5, 0.0), ValidationError);
  CHECK_THROWS_AS(survival_probability(1, 5, 1.5), ValidationError);
}

TEST_CASE("linear decay is strictly decreasing and ends at p_L") {
  for (double p_last : {0.2, 0.5, 0.8}) {
    const auto s = SurvivalSchedule::linear_decay(12, p_last);
    REQUIRE(s.p.size() == 12);
    for (std::size_t i = 1; i < 12; ++i) {
      CHECK(s.p[i] < s.p[i - 1]);
    }
    CHECK(s.p.back() == p_last);
    for (std::size_t i = 0; i + 1 < 12; ++i) {
      CHECK(s.p[i] == 1.0 - (static_cast<double>(i + 1) / 12.0) * (1.0 - p_last));
    }
  }
}

TEST_CASE("drop patterns") {
  NetworkSpec spec = t::small_spec();
  spec.segments = {{4, 4}, {5, 4}};
  const BlockIndexMap map(spec);

  SUBCASE("p_L = 1 keeps everything") {
    const auto s = SurvivalSchedule::linear_decay(map.skippable_blocks(), 1.0);
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
      CHECK(sample_drop_pattern(s, map, rng) == BlockMask::all_true(9));
    }
  }
  SUBCASE("keep frequencies converge to p_l") {
    const auto s = SurvivalSchedule::linear_decay(map.skippable_blocks(), 0.5);
    Rng rng(2);
    std::vector<std::size_t> kept(map.skippable_blocks(), 0);
    constexpr int draws = 20000;
    for (int d = 0; d < draws; ++d) {
      const auto mask = sample_drop_pattern(s, map, rng);
      CHECK(mask.keep[0]);
      CHECK(mask.keep[4]);
      for (std::size_t i = 0; i < kept.size(); ++i) {
        kept[i] += mask.keep[map.global_index(i)] ? 1 : 0;
      }
    }
    for (std::size_t i = 0; i < kept.size(); ++i) {
      CHECK(std::abs(static_cast<double>(kept[i]) / draws - s.p[i]) <= 0.01);
    }
  }
  SUBCASE("same seed, same sequence") {
    const auto s = SurvivalSchedule::linear_decay(map.skippable_blocks(), 0.3);
    Rng a(9), b(9);
    for (int i = 0; i < 100; ++i) {
      CHECK(sample_drop_pattern(s, map, a) == sample_drop_pattern(s, map, b));
    }
  }
}

TEST_CASE("learning-rate schedule") {
  const auto phases = default_lr_schedule(200, 0.1);
  REQUIRE(phases.size() == 3);
  CHECK(phases[0] == LrPhase{0, 100, 0.1});
  CHECK(phases[1].begin_epoch == 100);
  CHECK(phases[1].end_epoch == 170);
  CHECK(phases[1].lr == doctest::Approx(0.01));
  CHECK(phases[2].end_epoch == 200);
  CHECK(phases[2].lr == doctest::Approx(1e-4));

  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.lr_schedule = phases;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.lr_at(99) == 0.1);
  CHECK(cfg.lr_at(199) == doctest::Approx(1e-4));
  CHECK_THROWS_AS(cfg.lr_at(200), ValidationError);

  CHECK(default_lr_schedule(1).size() == 1);
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.lr_schedule = default_lr_schedule(10);
  CHECK_NOTHROW(cfg.validate());

  auto bad = cfg;
  bad.mode = TrainMode::stochastic;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad.p_last = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad.p_last = 0.5;
  CHECK_NOTHROW(bad.validate());

  bad = cfg;
  bad.p_last = 0.5;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = cfg;
  bad.lr_schedule.pop_back();
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

namespace {

DatasetPair toy_data() {
  DatasetSpec d;
  d.generator = "gaussian_mixture";
  d.num_classes = 3;
  d.input_dim = 3;
  d.train_size = 120;
  d.test_size = 60;
  d.noise = 0.3;
  d.seed = 5;
  return synthesize(d);
}

TrainConfig short_config(TrainMode mode, std::optional<double> p_last) {
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 16;
  cfg.lr_schedule = default_lr_schedule(6, 0.05);
  cfg.mode = mode;
  cfg.p_last = p_last;
  cfg.rng_seed = 17;
  return cfg;
}

} // namespace

TEST_CASE("baseline equals stochastic with p_L = 1") {
  const auto data = toy_data();
  const auto model = init_model(t::small_spec());
  const auto base = train(model, data.train, short_config(TrainMode::baseline, std::nullopt));
  const auto stoch = train(model, data.train, short_config(TrainMode::stochastic, 1.0));
  CHECK(base.model == stoch.model);
}

TEST_CASE("training is deterministic and records history") {
  const auto data = toy_data();
  const auto model = init_model(t::small_spec());
  const auto cfg = short_config(TrainMode::stochastic, 0.5);
  const auto a = train(model, data.train, cfg, &data.test);
  const auto b = train(model, data.train, cfg, &data.test);
  CHECK(a.model == b.model);
  REQUIRE(a.history.size() == 6);
  for (std::size_t e = 0; e < 6; ++e) {
    CHECK(a.history[e].epoch == e);
    CHECK(a.history[e].test_accuracy.has_value());
  }
  CHECK(a.history.back().loss < a.history.front().loss);
  CHECK_FALSE(a.model == train(model, data.train, short_config(TrainMode::baseline, std::nullopt)).model);
}

TEST_CASE("test-time scaling flag") {
  const auto data = toy_data();
  const auto model = init_model(t::small_spec());
  auto cfg = short_config(TrainMode::stochastic, 0.5);
  CHECK(train(model, data.train, cfg).model.branch_scale.empty());
  cfg.test_time_scaling = true;
  const auto scaled = train(model, data.train, cfg).model;
  REQUIRE(scaled.branch_scale.size() == 5);
  CHECK(scaled.branch_scale[0] == 1.0);
  CHECK(scaled.branch_scale[model.index_map.global_index(2)] == 0.5);
}

TEST_CASE("divergence surfaces as a runtime error") {
  const auto data = toy_data();
  auto model = init_model(t::small_spec());
  t::scramble(model, 4, 50.0);
  auto cfg = short_config(TrainMode::baseline, std::nullopt);
  cfg.lr_schedule = {{0, 6, 1e6}};
  CHECK_THROWS_AS(train(model, data.train, cfg), RuntimeError);
}

TEST_CASE("dataset shape mismatch is rejected") {
  const auto data = toy_data();
  NetworkSpec spec = t::small_spec();
  spec.input_dim = 4;
  CHECK_THROWS_AS(train(init_model(spec), data.train, short_config(TrainMode::baseline, std::nullopt)),
                  ValidationError);
}
