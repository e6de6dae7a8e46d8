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

// End-to-end experiment commands. A run directory looks like
//
//   manifest.json                 seeds, specs, cost constants, file digests
//   data/{train,test}.csv
//   <run>/checkpoint.json, history.csv                       (train)
//   <run>/sensitivity.json, operating_points.json,
//   <run>/pareto.json, pareto_runtime.csv                    (analyze)
//   runtime/trace.csv, runtime/comparison.csv,
//   <run>/sim_{adaptive,static}.json, *_events.csv           (simulate)
//   report/curves.csv, report/summary.json                   (report)
//
// where <run> is the name of each training entry in the experiment config.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adaskip/datagen.hpp"
#include "adaskip/io.hpp"
#include "adaskip/nnet.hpp"
#include "adaskip/stochdepth.hpp"

namespace adaskip {

inline constexpr const char *kToolVersion = "0.1.0";

struct TrainingRun {
  std::string name;
  TrainConfig config;
};

struct AnalysisOptions {
  std::size_t random_samples_per_n = 20;
  std::uint64_t random_seed = 0;
  double energy_per_mac = 1.0;
};

struct RuntimeOptions {
  /// Virtual service time of the unskipped model; fixes the time scale.
  double full_service_time = 1.0;
  /// Defaults to the unskipped model's service time.
  std::optional<double> delta_req;
  /// Defaults to the unskipped accuracy minus min_acc_drop.
  std::optional<double> min_acc;
  double min_acc_drop = 0.10;
  std::size_t trace_count = 500;
  double base_period = 1.0;
  double deviation = 0.25;
  std::uint64_t trace_seed = 0;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  NetworkSpec network; // input_dim and num_classes come from the dataset
  std::vector<TrainingRun> training;
  AnalysisOptions analysis;
  RuntimeOptions runtime;

  void validate() const;
};

ExperimentConfig experiment_from_json(const io::Json &j);
io::Json experiment_to_json(const ExperimentConfig &cfg);
ExperimentConfig load_experiment(const std::filesystem::path &path);

/// Replaces the model init seed and every training seed with values derived
/// from one run seed (the CLI's --seed).
void apply_seed_override(ExperimentConfig &cfg, std::uint64_t seed);

/// Run manifest stored as manifest.json in the run directory.
class Manifest {
public:
  static Manifest create(const ExperimentConfig &cfg);
  static Manifest load(const std::filesystem::path &run_dir);
  void save(const std::filesystem::path &run_dir) const;

  /// Writes the file under run_dir and records its SHA-256.
  void emit(const std::filesystem::path &run_dir, const std::string &relative,
            const std::string &content);
  /// Reads a recorded artifact; throws ValidationError("digest_mismatch") if
  /// its bytes no longer match, ("unregistered_artifact") if unknown.
  std::string load_verified(const std::filesystem::path &run_dir,
                            const std::string &relative) const;

  bool has_artifact(const std::string &relative) const;
  const io::Json &json() const noexcept { return doc_; }
  io::Json &json() noexcept { return doc_; }

private:
  io::Json doc_;
};

struct AnalyzeSummary {
  struct Run {
    std::string name;
    std::size_t skippable = 0;
    std::size_t evaluations = 0;
    std::size_t front_size = 0;
  };
  std::vector<Run> runs;
};

struct SimulateOverrides {
  std::optional<std::filesystem::path> pareto_file; // pareto.json or runtime CSV
  std::optional<std::filesystem::path> trace_file;
  std::optional<double> delta_req;
  std::optional<double> min_acc;
};

struct ComparisonRow {
  std::string run;
  std::string runtime; // "adaptive" or "static"
  SimReport report;
};

void cmd_train(const ExperimentConfig &cfg, const std::filesystem::path &run_dir);
AnalyzeSummary cmd_analyze(const ExperimentConfig &cfg, const std::filesystem::path &run_dir);
std::vector<ComparisonRow> cmd_simulate(const ExperimentConfig &cfg,
                                        const std::filesystem::path &run_dir,
                                        const SimulateOverrides &overrides = {});
void cmd_report(const ExperimentConfig &cfg, const std::filesystem::path &run_dir);

/// Filter-only utility: operating points in, Pareto JSON and runtime CSV out.
ParetoSet cmd_pareto(const std::filesystem::path &points_file,
                     std::optional<double> min_acc,
                     const std::filesystem::path &out_json,
                     const std::filesystem::path &out_csv);

/// train -> analyze -> simulate -> report.
void run_pipeline(const ExperimentConfig &cfg, const std::filesystem::path &run_dir);

} // namespace adaskip
