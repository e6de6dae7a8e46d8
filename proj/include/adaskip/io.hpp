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

// Artifact formats. Every file is versioned JSON or CSV; docs/formats.md has
// the exact layouts. Writers are canonical: write -> read -> write reproduces
// the same bytes.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "adaskip/datagen.hpp"
#include "adaskip/nnet.hpp"
#include "adaskip/runtime.hpp"
#include "adaskip/skip_analysis.hpp"
#include "adaskip/stochdepth.hpp"

namespace adaskip::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

std::string read_file(const std::filesystem::path &path);
/// Creates parent directories. Throws RuntimeError("io") on failure.
void write_file(const std::filesystem::path &path, std::string_view content);

std::string sha256_hex(std::string_view bytes);

/// Reads a versioned JSON document and checks its "format" tag.
Json parse_json(std::string_view text, std::string_view expected_format);
std::string dump_json(const Json &doc);

// Specs and configs ----------------------------------------------------------

Json network_spec_to_json(const NetworkSpec &spec);
NetworkSpec network_spec_from_json(const Json &j);

Json train_config_to_json(const TrainConfig &cfg);
TrainConfig train_config_from_json(const Json &j);

Json dataset_spec_to_json(const DatasetSpec &spec);
DatasetSpec dataset_spec_from_json(const Json &j);

// Checkpoint -----------------------------------------------------------------

std::string write_checkpoint(const ResidualModel &model);
ResidualModel read_checkpoint(std::string_view text);

// Datasets, traces, histories -------------------------------------------------

std::string write_dataset_csv(const Dataset &data);
Dataset read_dataset_csv(std::string_view text);

std::string write_trace_csv(std::span<const double> arrivals);
std::vector<double> read_trace_csv(std::string_view text);

std::string write_history_csv(std::span<const EpochStats> history);
std::vector<EpochStats> read_history_csv(std::string_view text);

// Analysis artifacts -----------------------------------------------------------

std::string write_sensitivity(const SensitivityList &list);
SensitivityList read_sensitivity(std::string_view text);

/// Reference values that accompany a point set: the unskipped model.
struct FrontReference {
  double full_accuracy = 0.0;
  double full_latency_cost = 0.0;
  double energy_per_mac = 1.0;

  bool operator==(const FrontReference &) const = default;
};

struct PointFile {
  std::string kind; // "operating_points" or "pareto"
  FrontReference reference;
  std::vector<OperatingPoint> points;
};

std::string write_points(const PointFile &file);
PointFile read_points(std::string_view text);

/// Runtime export: one row per Pareto configuration, sorted by n_skipped.
std::string write_runtime_csv(const ParetoSet &front);
/// Energy is not part of the export; it is rebuilt as energy_per_mac * latency.
ParetoSet read_runtime_csv(std::string_view text, double energy_per_mac);

// Simulation -------------------------------------------------------------------

std::string write_sim_report(const SimReport &report, const RuntimePolicy &policy);

/// Counters and the policy summary of a report. Events live in the CSV log;
/// policy points carry only skip bits and accuracy.
struct SimReportFile {
  SimReport report;
  RuntimePolicy policy;
};
SimReportFile read_sim_report(std::string_view text);
std::string write_events_csv(std::span<const EventRecord> events);
std::vector<EventRecord> read_events_csv(std::string_view text);

} // namespace adaskip::io
