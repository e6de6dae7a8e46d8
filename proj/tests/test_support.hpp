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

#pragma once

// Test-only oracles. Nothing here calls into the forward/backward code paths
// it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "adaskip/nnet.hpp"
#include "adaskip/rng.hpp"
#include "adaskip/runtime.hpp"
#include "adaskip/skip_analysis.hpp"

namespace adaskip::testing {

inline NetworkSpec small_spec(std::uint64_t seed = 7) {
  NetworkSpec spec;
  spec.input_dim = 3;
  spec.num_classes = 3;
  spec.segments = {{2, 4}, {3, 5}};
  spec.init_seed = seed;
  return spec;
}

inline Matrix random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double &v : m.data()) {
    v = rng.uniform(-1.5, 1.5);
  }
  return m;
}

inline std::vector<int> random_labels(std::size_t n, std::size_t classes, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> y(n);
  for (int &v : y) {
    v = static_cast<int>(rng.uniform_index(classes));
  }
  return y;
}

/// Random mask: each skippable block kept with probability 1/2.
inline BlockMask random_mask(const ResidualModel &model, Rng &rng) {
  BlockMask mask = BlockMask::all_true(model.index_map.total_blocks());
  for (std::size_t i = 0; i < model.index_map.skippable_blocks(); ++i) {
    mask.keep[model.index_map.global_index(i)] = rng.bernoulli(0.5);
  }
  return mask;
}

/// Randomizes every weight and bias so gradient checks see non-zero biases.
inline void scramble(ResidualModel &model, std::uint64_t seed, double scale = 0.6) {
  Rng rng(seed);
  for_each_affine(model.params, [&](Affine &a) {
    for (double &w : a.weight) {
      w = rng.uniform(-scale, scale);
    }
    for (double &b : a.bias) {
      b = rng.uniform(-scale, scale);
    }
  });
}

/// Weight surgery: the block's residual branch contributes exactly zero, so
/// the block computes x + 0 = x.
inline ResidualModel identity_surgery(ResidualModel model, const BlockMask &mask) {
  for (std::size_t g = 0; g < mask.keep.size(); ++g) {
    if (!mask.keep[g]) {
      auto &second = model.params.blocks[g].second;
      std::fill(second.weight.begin(), second.weight.end(), 0.0);
      std::fill(second.bias.begin(), second.bias.end(), 0.0);
    }
  }
  return model;
}

/// Plain-loop forward without gates: every block executes.
inline Matrix gate_free_forward(const ResidualModel &model, const Matrix &x) {
  const auto affine = [](const Affine &a, const std::vector<double> &in) {
    std::vector<double> out(a.out_dim);
    for (std::size_t o = 0; o < a.out_dim; ++o) {
      double acc = a.bias[o];
      for (std::size_t i = 0; i < a.in_dim; ++i) {
        acc += a.weight[o * a.in_dim + i] * in[i];
      }
      out[o] = acc;
    }
    return out;
  };
  const auto relu = [](std::vector<double> v) {
    for (double &e : v) {
      e = e > 0.0 ? e : 0.0;
    }
    return v;
  };
  Matrix logits(x.rows(), model.spec.num_classes);
  for (std::size_t s = 0; s < x.rows(); ++s) {
    std::vector<double> h(x.row(s).begin(), x.row(s).end());
    h = affine(model.params.stem, h);
    for (const auto &block : model.params.blocks) {
      if (block.transition) {
        h = affine(*block.transition, h);
      }
      const auto branch = affine(block.second, relu(affine(block.first, h)));
      for (std::size_t i = 0; i < h.size(); ++i) {
        h[i] += branch[i];
      }
    }
    const auto z = affine(model.params.head, relu(h));
    std::copy(z.begin(), z.end(), logits.row(s).begin());
  }
  return logits;
}

/// Relative error with a small floor so exact zeros compare sanely.
inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

/// On/off state of every ReLU in a masked forward pass (plain loops). Central
/// differences are only meaningful when a probe leaves this pattern unchanged;
/// otherwise the probe straddles a kink.
inline std::vector<bool> relu_pattern(const ResidualModel &model, const Matrix &x,
                                      const BlockMask &mask) {
  std::vector<bool> pattern;
  const auto affine = [](const Affine &a, const std::vector<double> &in) {
    std::vector<double> out(a.out_dim);
    for (std::size_t o = 0; o < a.out_dim; ++o) {
      double acc = a.bias[o];
      for (std::size_t i = 0; i < a.in_dim; ++i) {
        acc += a.weight[o * a.in_dim + i] * in[i];
      }
      out[o] = acc;
    }
    return out;
  };
  const auto relu = [&pattern](std::vector<double> v) {
    for (double &e : v) {
      pattern.push_back(e > 0.0);
      e = e > 0.0 ? e : 0.0;
    }
    return v;
  };
  for (std::size_t s = 0; s < x.rows(); ++s) {
    std::vector<double> h(x.row(s).begin(), x.row(s).end());
    h = affine(model.params.stem, h);
    for (std::size_t g = 0; g < model.params.blocks.size(); ++g) {
      const auto &block = model.params.blocks[g];
      if (block.transition) {
        h = affine(*block.transition, h);
      }
      if (!mask.keep[g]) {
        continue;
      }
      const auto branch = affine(block.second, relu(affine(block.first, h)));
      for (std::size_t i = 0; i < h.size(); ++i) {
        h[i] += branch[i];
      }
    }
    relu(h);
  }
  return pattern;
}

struct GradientCheck {
  double worst = 0.0;     // max relative error over all entries
  std::size_t entries = 0;
  bool kink = false;      // some probe crossed a ReLU kink
};

/// Compares every analytic gradient entry with a central difference of step h.
inline GradientCheck check_gradients(ResidualModel model, const Matrix &x,
                                     const std::vector<int> &y, const BlockMask &mask,
                                     double h) {
  GradientCheck out;
  const auto analytic = loss_and_gradients(model, x, y, mask).grad;
  const auto base = relu_pattern(model, x, mask);
  std::vector<const Affine *> grads;
  for_each_affine(analytic, [&](const Affine &a) { grads.push_back(&a); });
  std::size_t pos = 0;
  for_each_affine(model.params, [&](Affine &a) {
    const Affine &g = *grads[pos++];
    const auto probe = [&](std::vector<double> &values, const std::vector<double> &ga) {
      for (std::size_t i = 0; i < values.size(); ++i) {
        const double saved = values[i];
        values[i] = saved + h;
        const double up = loss_and_gradients(model, x, y, mask).loss;
        const bool same_up = relu_pattern(model, x, mask) == base;
        values[i] = saved - h;
        const double down = loss_and_gradients(model, x, y, mask).loss;
        const bool same_down = relu_pattern(model, x, mask) == base;
        values[i] = saved;
        out.kink = out.kink || !same_up || !same_down;
        out.worst = std::max(out.worst, relative_error(ga[i], (up - down) / (2 * h)));
        ++out.entries;
      }
    };
    probe(a.weight, g.weight);
    probe(a.bias, g.bias);
  });
  return out;
}

/// Mean cross-entropy from logits, computed independently of the library.
inline double cross_entropy(const Matrix &logits, const std::vector<int> &labels) {
  double total = 0.0;
  for (std::size_t s = 0; s < logits.rows(); ++s) {
    const auto z = logits.row(s);
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) {
      sum += std::exp(v - m);
    }
    total += m + std::log(sum) - z[static_cast<std::size_t>(labels[s])];
  }
  return total / static_cast<double>(logits.rows());
}

/// Pairwise dominance oracle. Keeps a point unless another dominates it or
/// has identical objectives and a smaller (n_skipped, skip). Output uses the
/// ParetoSet order.
inline std::vector<OperatingPoint> brute_force_front(std::span<const OperatingPoint> points) {
  std::vector<OperatingPoint> keep;
  for (const auto &p : points) {
    bool out = false;
    for (const auto &q : points) {
      const bool dom = q.accuracy >= p.accuracy && q.latency_cost <= p.latency_cost &&
                       (q.accuracy > p.accuracy || q.latency_cost < p.latency_cost);
      const bool same = q.accuracy == p.accuracy && q.latency_cost == p.latency_cost &&
                        std::tie(q.n_skipped, q.skip) < std::tie(p.n_skipped, p.skip);
      if (dom || same) {
        out = true;
        break;
      }
    }
    if (!out) {
      keep.push_back(p);
    }
  }
  std::sort(keep.begin(), keep.end(), [](const OperatingPoint &a, const OperatingPoint &b) {
    return std::tie(a.n_skipped, b.latency_cost, a.skip) < std::tie(b.n_skipped, a.latency_cost, b.skip);
  });
  // Exact duplicates (same skip too) survive twice above; keep one.
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  return keep;
}

/// Random cloud of 1..max_points points on coarse grids, so exact ties in
/// accuracy and latency are common.
inline std::vector<OperatingPoint> random_cloud(Rng &rng, std::size_t max_points) {
  const std::size_t n = 1 + rng.uniform_index(max_points);
  std::vector<OperatingPoint> cloud(n);
  for (auto &p : cloud) {
    p.skip = SkipConfig::all_ones(8);
    for (auto &b : p.skip.bits) {
      b = static_cast<std::uint8_t>(rng.uniform_index(2));
    }
    p.n_skipped = p.skip.n_skipped();
    p.accuracy = static_cast<double>(rng.uniform_index(20)) / 20.0;
    p.latency_cost = static_cast<double>(10 + rng.uniform_index(30));
    p.energy_cost = 2.0 * p.latency_cost;
  }
  return cloud;
}

inline OperatingPoint make_point(double acc, double latency, const char *bits) {
  OperatingPoint p;
  p.skip = SkipConfig::parse(bits);
  p.n_skipped = p.skip.n_skipped();
  p.accuracy = acc;
  p.latency_cost = latency;
  p.energy_cost = latency;
  return p;
}

/// Five-point front; the last point sits below the scripted min_acc of 0.5.
inline ParetoSet scripted_front() {
  return ParetoSet{{make_point(0.90, 10, "1111"), make_point(0.85, 8, "1110"),
                    make_point(0.80, 6, "1100"), make_point(0.70, 4, "1000"),
                    make_point(0.40, 2, "0000")}};
}

struct ScriptedEvent {
  double t;
  Action action;
  std::size_t index;
  bool idle_decrease;
};

/// Hand-computed with delta_req = 10, time scale 1 (service times 10/8/6/4
/// after filtering). Covers drops, both saturations, the boundary at
/// busy_until and the idle rule at exactly delta_req (no decrease).
inline std::vector<ScriptedEvent> scripted_events() {
  const auto P = Action::processed;
  const auto D = Action::dropped;
  return {
      {0.0, P, 0, false},    // first request: no idle rule
      {1.0, D, 1, false},    {2.0, D, 2, false}, {3.0, D, 3, false},
      {4.0, D, 3, false},    // saturated at the last filtered config
      {10.0, P, 3, false},   // t == busy_until is free; gap == delta_req
      {13.0, D, 3, false},   {14.0, P, 3, false},
      {30.0, P, 2, true},    {41.0, P, 1, true}, {45.0, D, 2, false},
      {49.0, P, 2, false},   {60.0, P, 1, true}, {71.0, P, 0, true},
      {82.0, P, 0, true},    // idle rule saturated at the first config
      {91.0, D, 1, false},   {91.5, D, 2, false}, {92.0, P, 2, false},
      {97.5, D, 3, false},   {120.0, P, 2, true},
  };
}

} // namespace adaskip::testing
