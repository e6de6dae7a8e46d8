/*
 * Copyright (C) 2026 The adaskip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "adaskip/stochdepth.hpp"

#include <cmath>
#include <numeric>

#include "adaskip/error.hpp"

namespace adaskip {

double survival_probability(std::size_t l, std::size_t num_droppable,
                            double p_last) {
  if (num_droppable == 0 || l < 1 || l > num_droppable) {
    throw ValidationError("survival_range", "need 1 <= l <= L");
  }
  if (!(p_last > 0.0 && p_last <= 1.0)) {
    throw ValidationError("survival_range", "p_L must be in (0, 1]");
  }
  if (l == num_droppable) {
    return p_last; // 1 - (1 - p_L) does not round-trip in binary
  }
  return 1.0 - (static_cast<double>(l) / static_cast<double>(num_droppable)) *
                   (1.0 - p_last);
}

SurvivalSchedule SurvivalSchedule::linear_decay(std::size_t num_droppable,
                                                double p_last) {
  SurvivalSchedule s;
  s.p_last = p_last;
  s.p.reserve(num_droppable);
  for (std::size_t l = 1; l <= num_droppable; ++l) {
    s.p.push_back(survival_probability(l, num_droppable, p_last));
  }
  return s;
}

BlockMask sample_drop_pattern(const SurvivalSchedule &schedule,
                              const BlockIndexMap &map, Rng &rng) {
  if (schedule.p.size() != map.skippable_blocks()) {
    throw ValidationError("schedule_length",
                          "survival schedule does not cover the skippable blocks");
  }
  BlockMask mask = BlockMask::all_true(map.total_blocks());
  for (std::size_t i = 0; i < schedule.p.size(); ++i) {
    // One draw per block even when p_l == 1, so the stream position does not
    // depend on the schedule.
    mask.keep[map.global_index(i)] = rng.bernoulli(schedule.p[i]);
  }
  return mask;
}

std::vector<LrPhase> default_lr_schedule(std::size_t epochs, double base_lr) {
  const auto at = [epochs](double fraction) {
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(epochs)));
  };
  const std::size_t cut1 = at(0.5);
  const std::size_t cut2 = at(0.85);
  std::vector<LrPhase> phases;
  const LrPhase candidates[] = {
      {0, cut1, base_lr}, {cut1, cut2, base_lr * 0.1}, {cut2, epochs, base_lr * 1e-3}};
  for (const auto &phase : candidates) {
    if (phase.end_epoch > phase.begin_epoch) {
      phases.push_back(phase);
    }
  }
  return phases;
}

void TrainConfig::validate() const {
  if (epochs == 0) {
    throw ValidationError("train_config", "epochs must be positive");
  }
  if (batch_size == 0) {
    throw ValidationError("train_config", "batch_size must be positive");
  }
  std::size_t cursor = 0;
  for (const auto &phase : lr_schedule) {
    if (phase.begin_epoch != cursor || phase.end_epoch <= phase.begin_epoch) {
      throw ValidationError("train_config",
                            "lr_schedule phases must partition [0, epochs)");
    }
    if (!(phase.lr > 0.0) || !std::isfinite(phase.lr)) {
      throw ValidationError("train_config", "learning rates must be positive");
    }
    cursor = phase.end_epoch;
  }
  if (cursor != epochs) {
    throw ValidationError("train_config", "lr_schedule phases must partition [0, epochs)");
  }
  if (mode == TrainMode::stochastic) {
    if (!p_last) {
      throw ValidationError("train_config", "stochastic mode requires p_L");
    }
    if (!(*p_last > 0.0 && *p_last <= 1.0)) {
      throw ValidationError("train_config", "p_L must be in (0, 1]");
    }
  } else if (p_last) {
    throw ValidationError("train_config", "p_L is only valid in stochastic mode");
  }
}

double TrainConfig::lr_at(std::size_t epoch) const {
  for (const auto &phase : lr_schedule) {
    if (epoch >= phase.begin_epoch && epoch < phase.end_epoch) {
      return phase.lr;
    }
  }
  throw ValidationError("train_config", "epoch outside lr_schedule");
}

TrainResult train(ResidualModel model, const Dataset &train_set,
                  const TrainConfig &cfg, const Dataset *test_set) {
  cfg.validate();
  train_set.validate();
  if (train_set.features.cols() != model.spec.input_dim ||
      train_set.num_classes != model.spec.num_classes) {
    throw ValidationError("dimension_mismatch", "dataset does not fit the model");
  }

  const std::size_t n = train_set.size();
  const std::size_t dim = train_set.features.cols();
  const std::size_t skippable = model.index_map.skippable_blocks();
  const BlockMask full = BlockMask::all_true(model.index_map.total_blocks());
  const SurvivalSchedule schedule = SurvivalSchedule::linear_decay(
      skippable, cfg.mode == TrainMode::stochastic ? *cfg.p_last : 1.0);

  // Separate streams: a stochastic run with p_L = 1 shuffles exactly like a
  // baseline run.
  Rng order_rng(derive_seed(cfg.rng_seed, 0));
  Rng drop_rng(derive_seed(cfg.rng_seed, 1));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  Matrix batch;
  std::vector<int> labels;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.lr_at(epoch);
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[order_rng.uniform_index(i)]);
    }

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, n - start);
      batch = Matrix(count, dim);
      labels.resize(count);
      for (std::size_t r = 0; r < count; ++r) {
        const std::size_t src = order[start + r];
        const auto row = train_set.features.row(src);
        std::copy(row.begin(), row.end(), batch.row(r).begin());
        labels[r] = train_set.labels[src];
      }
      const BlockMask mask = cfg.mode == TrainMode::stochastic
                                 ? sample_drop_pattern(schedule, model.index_map, drop_rng)
                                 : full;
      const LossGradients lg = loss_and_gradients(model, batch, labels, mask);
      if (!std::isfinite(lg.loss)) {
        throw RuntimeError("non_finite_loss",
                           "loss became non-finite at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batches));
      }
      try {
        sgd_step(model, lg.grad, lr);
      } catch (const ValidationError &e) {
        throw RuntimeError("training_diverged", "epoch " + std::to_string(epoch) + ": " + e.what());
      }
      loss_sum += lg.loss;
      ++batches;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / static_cast<double>(batches);
    stats.train_accuracy = evaluate(model, train_set, full);
    if (test_set != nullptr) {
      stats.test_accuracy = evaluate(model, *test_set, full);
    }
    result.history.push_back(stats);
  }

  if (cfg.test_time_scaling && cfg.mode == TrainMode::stochastic) {
    model.branch_scale.assign(model.index_map.total_blocks(), 1.0);
    for (std::size_t i = 0; i < skippable; ++i) {
      model.branch_scale[model.index_map.global_index(i)] = schedule.p[i];
    }
  }
  result.model = std::move(model);
  return result;
}

} // namespace adaskip
