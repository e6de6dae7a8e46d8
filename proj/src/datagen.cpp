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

#include "adaskip/datagen.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "adaskip/error.hpp"
#include "adaskip/rng.hpp"

namespace adaskip {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Sampler = void (*)(const DatasetSpec &, int label, Rng &, std::span<double> out,
                         const std::vector<double> &centers);

void sample_spiral(const DatasetSpec &spec, int label, Rng &rng, std::span<double> out,
                   const std::vector<double> &) {
  const double t = rng.uniform01();
  const double radius = 0.2 + 0.8 * t;
  const double angle = 1.75 * kTwoPi * t +
                       kTwoPi * static_cast<double>(label) / static_cast<double>(spec.num_classes);
  out[0] = radius * std::cos(angle) + spec.noise * rng.normal();
  out[1] = radius * std::sin(angle) + spec.noise * rng.normal();
}

void sample_ring(const DatasetSpec &spec, int label, Rng &rng, std::span<double> out,
                 const std::vector<double> &) {
  const double radius =
      (1.0 + static_cast<double>(label)) / static_cast<double>(spec.num_classes);
  const double angle = kTwoPi * rng.uniform01();
  out[0] = radius * std::cos(angle) + spec.noise * rng.normal();
  out[1] = radius * std::sin(angle) + spec.noise * rng.normal();
}

void sample_blob(const DatasetSpec &spec, int label, Rng &rng, std::span<double> out,
                 const std::vector<double> &centers) {
  const double *c = centers.data() + static_cast<std::size_t>(label) * spec.input_dim;
  for (std::size_t i = 0; i < spec.input_dim; ++i) {
    out[i] = c[i] + spec.noise * rng.normal();
  }
}

Dataset draw(const DatasetSpec &spec, std::size_t count, Split split, Sampler sampler,
             const std::vector<double> &centers, Rng &rng) {
  Dataset d;
  d.num_classes = spec.num_classes;
  d.split = split;
  d.features = Matrix(count, spec.input_dim);
  d.labels.resize(count);
  const bool planar = sampler != sample_blob;
  for (std::size_t s = 0; s < count; ++s) {
    const int label = static_cast<int>(s % spec.num_classes);
    d.labels[s] = label;
    auto row = d.features.row(s);
    sampler(spec, label, rng, row, centers);
    if (planar) {
      for (std::size_t i = 2; i < spec.input_dim; ++i) {
        row[i] = spec.noise * rng.normal();
      }
    }
  }
  return d;
}

} // namespace

void DatasetSpec::validate() const {
  if (generator != "spirals" && generator != "rings" && generator != "gaussian_mixture") {
    throw ValidationError("dataset_spec", "unknown dataset generator '" + generator + "'");
  }
  if (num_classes < 2) {
    throw ValidationError("dataset_spec", "need at least two classes");
  }
  if (input_dim == 0 || (generator != "gaussian_mixture" && input_dim < 2)) {
    throw ValidationError("dataset_spec", "input_dim too small for generator");
  }
  if (train_size < num_classes || test_size < num_classes) {
    throw ValidationError("dataset_spec", "each split needs one example per class");
  }
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw ValidationError("dataset_spec", "noise must be finite and >= 0");
  }
}

DatasetPair synthesize(const DatasetSpec &spec) {
  spec.validate();
  Sampler sampler = sample_spiral;
  if (spec.generator == "rings") {
    sampler = sample_ring;
  } else if (spec.generator == "gaussian_mixture") {
    sampler = sample_blob;
  }

  std::vector<double> centers;
  if (sampler == sample_blob) {
    Rng center_rng(derive_seed(spec.seed, 0));
    centers.resize(spec.num_classes * spec.input_dim);
    for (double &c : centers) {
      c = center_rng.normal();
    }
  }
  Rng train_rng(derive_seed(spec.seed, 1));
  Rng test_rng(derive_seed(spec.seed, 2));
  return DatasetPair{draw(spec, spec.train_size, Split::train, sampler, centers, train_rng),
                     draw(spec, spec.test_size, Split::test, sampler, centers, test_rng)};
}

} // namespace adaskip
