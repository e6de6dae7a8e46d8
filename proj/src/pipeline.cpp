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

#include "adaskip/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "adaskip/error.hpp"
#include "adaskip/runtime.hpp"
#include "adaskip/skip_analysis.hpp"

namespace adaskip {

namespace fs = std::filesystem;
using io::Json;

namespace {

template <class T> T field(const Json &j, const char *key, const std::string &where) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
    throw ValidationError("missing_field", where + "." + key + " is required");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception &) {
    throw ValidationError("field_type", where + "." + key + " has the wrong type");
  }
}

template <class T>
std::optional<T> optional_field(const Json &j, const char *key, const std::string &where) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return field<T>(j, key, where);
}

Json optional_json(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

double full_model_cost(const ExperimentConfig &cfg) {
  const ResidualModel skeleton = init_model(cfg.network);
  return static_cast<double>(
      model_cost(skeleton, SkipConfig::all_ones(skeleton.index_map.skippable_blocks())));
}

std::string run_path(const TrainingRun &run, const char *file) { return run.name + "/" + file; }

} // namespace

// ---------------------------------------------------------------------------
// Experiment config

void ExperimentConfig::validate() const {
  dataset.validate();
  network.validate();
  if (network.input_dim != dataset.input_dim || network.num_classes != dataset.num_classes) {
    throw ValidationError("config_reference", "model dimensions must follow the dataset");
  }
  if (training.empty()) {
    throw ValidationError("config", "at least one training run is required");
  }
  std::set<std::string> names;
  for (const auto &run : training) {
    if (run.name.empty() || run.name.find_first_of("/\\. ") != std::string::npos ||
        run.name == "data" || run.name == "report" || run.name == "runtime") {
      throw ValidationError("config", "invalid training run name '" + run.name + "'");
    }
    if (!names.insert(run.name).second) {
      throw ValidationError("config", "duplicate training run name '" + run.name + "'");
    }
    run.config.validate();
  }
  if (!(analysis.energy_per_mac > 0.0)) {
    throw ValidationError("config", "analysis.energy_per_mac must be positive");
  }
  if (!(runtime.full_service_time > 0.0)) {
    throw ValidationError("config", "runtime.full_service_time must be positive");
  }
  if (runtime.delta_req && !(*runtime.delta_req > 0.0)) {
    throw ValidationError("config", "runtime.delta_req must be positive");
  }
  if (runtime.trace_count == 0 || !(runtime.base_period > 0.0) ||
      !(runtime.deviation >= 0.0 && runtime.deviation < 1.0)) {
    throw ValidationError("config", "invalid runtime.trace parameters");
  }
}

ExperimentConfig experiment_from_json(const Json &j) {
  ExperimentConfig cfg;
  cfg.dataset = io::dataset_spec_from_json(field<Json>(j, "dataset", "config"));

  Json model = field<Json>(j, "model", "config");
  model["input_dim"] = cfg.dataset.input_dim;
  model["num_classes"] = cfg.dataset.num_classes;
  cfg.network = io::network_spec_from_json(model);

  const Json training = field<Json>(j, "training", "config");
  if (!training.is_array()) {
    throw ValidationError("field_type", "config.training must be an array");
  }
  for (const auto &t : training) {
    cfg.training.push_back({field<std::string>(t, "name", "training[]"),
                            io::train_config_from_json(t)});
  }

  const Json analysis = field<Json>(j, "analysis", "config");
  cfg.analysis.random_samples_per_n =
      field<std::size_t>(analysis, "random_samples_per_n", "analysis");
  cfg.analysis.random_seed = field<std::uint64_t>(analysis, "random_seed", "analysis");
  cfg.analysis.energy_per_mac = field<double>(analysis, "energy_per_mac", "analysis");

  const Json runtime = field<Json>(j, "runtime", "config");
  cfg.runtime.full_service_time = field<double>(runtime, "full_service_time", "runtime");
  cfg.runtime.delta_req = optional_field<double>(runtime, "delta_req", "runtime");
  cfg.runtime.min_acc = optional_field<double>(runtime, "min_acc", "runtime");
  cfg.runtime.min_acc_drop =
      optional_field<double>(runtime, "min_acc_drop", "runtime").value_or(0.10);
  const Json trace = field<Json>(runtime, "trace", "runtime");
  cfg.runtime.trace_count = field<std::size_t>(trace, "count", "runtime.trace");
  cfg.runtime.base_period = field<double>(trace, "base_period", "runtime.trace");
  cfg.runtime.deviation = field<double>(trace, "deviation", "runtime.trace");
  cfg.runtime.trace_seed = field<std::uint64_t>(trace, "seed", "runtime.trace");

  cfg.validate();
  return cfg;
}

Json experiment_to_json(const ExperimentConfig &cfg) {
  Json j;
  j["dataset"] = io::dataset_spec_to_json(cfg.dataset);
  Json model = io::network_spec_to_json(cfg.network);
  model.erase("input_dim");
  model.erase("num_classes");
  j["model"] = model;
  Json training = Json::array();
  for (const auto &run : cfg.training) {
    Json t;
    t["name"] = run.name;
    const Json body = io::train_config_to_json(run.config);
    for (const auto &[k, v] : body.items()) {
      t[k] = v;
    }
    training.push_back(std::move(t));
  }
  j["training"] = std::move(training);
  j["analysis"] = Json{{"random_samples_per_n", cfg.analysis.random_samples_per_n},
                       {"random_seed", cfg.analysis.random_seed},
                       {"energy_per_mac", cfg.analysis.energy_per_mac}};
  j["runtime"] = Json{{"full_service_time", cfg.runtime.full_service_time},
                      {"delta_req", optional_json(cfg.runtime.delta_req)},
                      {"min_acc", optional_json(cfg.runtime.min_acc)},
                      {"min_acc_drop", cfg.runtime.min_acc_drop},
                      {"trace", Json{{"count", cfg.runtime.trace_count},
                                     {"base_period", cfg.runtime.base_period},
                                     {"deviation", cfg.runtime.deviation},
                                     {"seed", cfg.runtime.trace_seed}}}};
  return j;
}

ExperimentConfig load_experiment(const fs::path &path) {
  return experiment_from_json(io::parse_json(io::read_file(path), ""));
}

void apply_seed_override(ExperimentConfig &cfg, std::uint64_t seed) {
  cfg.network.init_seed = derive_seed(seed, 0);
  for (std::size_t i = 0; i < cfg.training.size(); ++i) {
    cfg.training[i].config.rng_seed = derive_seed(seed, i + 1);
  }
}

// ---------------------------------------------------------------------------
// Manifest

Manifest Manifest::create(const ExperimentConfig &cfg) {
  Manifest m;
  Json &d = m.doc_;
  d["format"] = "adaskip-manifest";
  d["version"] = io::kFormatVersion;
  d["tool_version"] = kToolVersion;
  d["init_scheme"] = kInitScheme;
  const Json config = experiment_to_json(cfg);
  d["config_sha256"] = io::sha256_hex(io::dump_json(config));
  d["config"] = config;

  Json training_seeds;
  for (const auto &run : cfg.training) {
    training_seeds[run.name] = run.config.rng_seed;
  }
  d["seeds"] = Json{{"dataset", cfg.dataset.seed},
                    {"init", cfg.network.init_seed},
                    {"training", training_seeds},
                    {"analysis_random", cfg.analysis.random_seed},
                    {"trace", cfg.runtime.trace_seed}};

  const double full_cost = full_model_cost(cfg);
  d["cost_model"] = Json{{"unit", "multiply-accumulate"},
                         {"energy_per_mac", cfg.analysis.energy_per_mac},
                         {"full_model_cost", full_cost},
                         {"full_service_time", cfg.runtime.full_service_time},
                         {"time_scale", cfg.runtime.full_service_time / full_cost}};
  d["artifacts"] = Json::object();
  return m;
}

Manifest Manifest::load(const fs::path &run_dir) {
  const fs::path path = run_dir / "manifest.json";
  if (!fs::exists(path)) {
    throw ValidationError("incomplete_run", "no manifest.json in " + run_dir.string() +
                                                "; run 'train' first");
  }
  Manifest m;
  m.doc_ = io::parse_json(io::read_file(path), "adaskip-manifest");
  if (!m.doc_.contains("artifacts") || !m.doc_["artifacts"].is_object()) {
    throw ValidationError("manifest_format", "manifest has no artifacts table");
  }
  return m;
}

void Manifest::save(const fs::path &run_dir) const {
  Json out = doc_;
  std::map<std::string, Json> sorted;
  for (auto &[k, v] : doc_["artifacts"].items()) {
    sorted.emplace(k, v);
  }
  Json artifacts = Json::object();
  for (auto &[k, v] : sorted) {
    artifacts[k] = v;
  }
  out["artifacts"] = std::move(artifacts);
  io::write_file(run_dir / "manifest.json", io::dump_json(out));
}

void Manifest::emit(const fs::path &run_dir, const std::string &relative,
                    const std::string &content) {
  io::write_file(run_dir / relative, content);
  doc_["artifacts"][relative] = io::sha256_hex(content);
}

bool Manifest::has_artifact(const std::string &relative) const {
  return doc_["artifacts"].contains(relative);
}

std::string Manifest::load_verified(const fs::path &run_dir, const std::string &relative) const {
  if (!has_artifact(relative)) {
    throw ValidationError("unregistered_artifact",
                          relative + " is not recorded in the manifest; run the producing "
                                     "command first");
  }
  if (!fs::exists(run_dir / relative)) {
    throw ValidationError("incomplete_run", relative + " is missing from " + run_dir.string());
  }
  std::string content = io::read_file(run_dir / relative);
  if (io::sha256_hex(content) != doc_["artifacts"][relative].get<std::string>()) {
    throw ValidationError("digest_mismatch", relative + " does not match its manifest digest");
  }
  return content;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_train(const ExperimentConfig &cfg, const fs::path &run_dir) {
  cfg.validate();
  Manifest manifest = Manifest::create(cfg);
  const DatasetPair data = synthesize(cfg.dataset);
  manifest.emit(run_dir, "data/train.csv", io::write_dataset_csv(data.train));
  manifest.emit(run_dir, "data/test.csv", io::write_dataset_csv(data.test));

  for (const auto &run : cfg.training) {
    TrainResult result = train(init_model(cfg.network), data.train, run.config, &data.test);
    manifest.emit(run_dir, run_path(run, "checkpoint.json"), io::write_checkpoint(result.model));
    manifest.emit(run_dir, run_path(run, "history.csv"), io::write_history_csv(result.history));
  }
  manifest.save(run_dir);
}

namespace {

struct LoadedRun {
  ResidualModel model;
  Dataset test;
};

LoadedRun load_run(const Manifest &manifest, const fs::path &run_dir, const TrainingRun &run) {
  LoadedRun out{io::read_checkpoint(manifest.load_verified(run_dir, run_path(run, "checkpoint.json"))),
                io::read_dataset_csv(manifest.load_verified(run_dir, "data/test.csv"))};
  if (out.test.features.cols() != out.model.spec.input_dim ||
      out.test.num_classes != out.model.spec.num_classes) {
    throw ValidationError("dimension_mismatch", "test data does not fit the checkpoint");
  }
  return out;
}

} // namespace

AnalyzeSummary cmd_analyze(const ExperimentConfig &cfg, const fs::path &run_dir) {
  cfg.validate();
  Manifest manifest = Manifest::load(run_dir);
  AnalyzeSummary summary;
  for (const auto &run : cfg.training) {
    const LoadedRun loaded = load_run(manifest, run_dir, run);
    const ConfigEvaluator evaluator(loaded.model, loaded.test);
    const MacCostProvider cost(loaded.model, cfg.analysis.energy_per_mac);

    const SensitivityList list = sensitivity_scan(evaluator);
    const std::vector<SkipConfig> family = sensitivity_family(list);
    const std::vector<OperatingPoint> points =
        evaluate_operating_points(evaluator, cost, family);
    const ParetoSet front = pareto_filter(points);
    front.validate();

    io::FrontReference ref;
    ref.full_accuracy = points.front().accuracy;
    ref.full_latency_cost = points.front().latency_cost;
    ref.energy_per_mac = cfg.analysis.energy_per_mac;

    manifest.emit(run_dir, run_path(run, "sensitivity.json"), io::write_sensitivity(list));
    manifest.emit(run_dir, run_path(run, "operating_points.json"),
                  io::write_points({"operating_points", ref, points}));
    manifest.emit(run_dir, run_path(run, "pareto.json"),
                  io::write_points({"pareto", ref, front.points}));
    manifest.emit(run_dir, run_path(run, "pareto_runtime.csv"), io::write_runtime_csv(front));

    summary.runs.push_back({run.name, evaluator.skippable_blocks(), evaluator.evaluations(),
                            front.points.size()});
  }
  manifest.save(run_dir);
  return summary;
}

ParetoSet cmd_pareto(const fs::path &points_file, std::optional<double> min_acc,
                     const fs::path &out_json, const fs::path &out_csv) {
  io::PointFile in = io::read_points(io::read_file(points_file));
  if (in.points.empty()) {
    throw ValidationError("pareto_empty", "point file has no points");
  }
  ParetoSet front = pareto_filter(in.points);
  if (min_acc) {
    front = filter_by_accuracy(front, *min_acc);
  }
  front.validate();
  io::write_file(out_json, io::write_points({"pareto", in.reference, front.points}));
  io::write_file(out_csv, io::write_runtime_csv(front));
  return front;
}

namespace {

struct FrontInput {
  std::string name;
  ParetoSet front;
  io::FrontReference reference;
};

OperatingPoint no_skip_point(const FrontInput &in) {
  OperatingPoint p;
  p.skip = SkipConfig::all_ones(in.front.points.front().skip.size());
  p.accuracy = in.reference.full_accuracy;
  p.latency_cost = in.reference.full_latency_cost;
  p.energy_cost = in.reference.energy_per_mac * in.reference.full_latency_cost;
  return p;
}

std::string comparison_csv(const std::vector<ComparisonRow> &rows) {
  std::string out = "# adaskip-comparison v" + std::to_string(io::kFormatVersion) + "\n" +
                    "run,runtime,requests,processed,dropped,average_accuracy,total_cost,"
                    "inferences_per_cost,processed_vs_static,efficiency_vs_static\n";
  std::map<std::string, const SimReport *> statics;
  for (const auto &r : rows) {
    if (r.runtime == "static") {
      statics[r.run] = &r.report;
    }
  }
  for (const auto &r : rows) {
    const SimReport &s = *statics.at(r.run);
    const double processed_ratio =
        s.processed > 0 ? static_cast<double>(r.report.processed) / static_cast<double>(s.processed)
                        : 0.0;
    const double efficiency_ratio =
        s.inferences_per_cost > 0.0 ? r.report.inferences_per_cost / s.inferences_per_cost : 0.0;
    out += r.run + "," + r.runtime + "," +
           std::to_string(r.report.processed + r.report.dropped) + "," +
           std::to_string(r.report.processed) + "," + std::to_string(r.report.dropped) + "," +
           io::format_double(r.report.average_accuracy) + "," +
           io::format_double(r.report.total_cost) + "," +
           io::format_double(r.report.inferences_per_cost) + "," +
           io::format_double(processed_ratio) + "," + io::format_double(efficiency_ratio) + "\n";
  }
  return out;
}

} // namespace

std::vector<ComparisonRow> cmd_simulate(const ExperimentConfig &cfg, const fs::path &run_dir,
                                        const SimulateOverrides &overrides) {
  cfg.validate();
  Manifest manifest = Manifest::load(run_dir);

  std::vector<FrontInput> fronts;
  if (overrides.pareto_file) {
    const std::string text = io::read_file(*overrides.pareto_file);
    FrontInput in;
    in.name = overrides.pareto_file->stem().string();
    if (overrides.pareto_file->extension() == ".csv") {
      in.front = io::read_runtime_csv(text, cfg.analysis.energy_per_mac);
      if (in.front.points.front().n_skipped != 0) {
        throw ValidationError("no_skip_reference",
                              "runtime CSV has no unskipped row to compare against; "
                              "pass the pareto.json instead");
      }
      in.reference.full_accuracy = in.front.points.front().accuracy;
      in.reference.full_latency_cost = in.front.points.front().latency_cost;
      in.reference.energy_per_mac = cfg.analysis.energy_per_mac;
    } else {
      io::PointFile file = io::read_points(text);
      in.front = pareto_filter(file.points);
      in.reference = file.reference;
    }
    fronts.push_back(std::move(in));
  } else {
    for (const auto &run : cfg.training) {
      io::PointFile file =
          io::read_points(manifest.load_verified(run_dir, run_path(run, "pareto.json")));
      fronts.push_back({run.name, ParetoSet{file.points}, file.reference});
    }
  }

  std::vector<double> arrivals;
  if (overrides.trace_file) {
    arrivals = io::read_trace_csv(io::read_file(*overrides.trace_file));
  } else {
    arrivals = generate_trace(cfg.runtime.trace_count, cfg.runtime.base_period,
                              cfg.runtime.deviation, cfg.runtime.trace_seed)
                   .arrivals;
  }
  manifest.emit(run_dir, "runtime/trace.csv", io::write_trace_csv(arrivals));

  std::vector<ComparisonRow> rows;
  for (const auto &in : fronts) {
    const ServiceModel service{cfg.runtime.full_service_time / in.reference.full_latency_cost};
    const double delta_req = overrides.delta_req.value_or(
        cfg.runtime.delta_req.value_or(in.reference.full_latency_cost * service.time_scale));
    const double min_acc = overrides.min_acc.value_or(
        cfg.runtime.min_acc.value_or(in.reference.full_accuracy - cfg.runtime.min_acc_drop));
    const RuntimePolicy adaptive = RuntimePolicy::make(in.front, delta_req, min_acc);
    const RuntimePolicy fixed = static_policy(adaptive, no_skip_point(in));

    for (const auto &[label, policy] :
         {std::pair<std::string, const RuntimePolicy *>{"adaptive", &adaptive},
          std::pair<std::string, const RuntimePolicy *>{"static", &fixed}}) {
      SimReport report = simulate(*policy, arrivals, service);
      if (replay_events(*policy, report.events) != report) {
        throw RuntimeError("replay_mismatch", "event log does not reproduce the report");
      }
      manifest.emit(run_dir, in.name + "/sim_" + label + ".json",
                    io::write_sim_report(report, *policy));
      manifest.emit(run_dir, in.name + "/sim_" + label + "_events.csv",
                    io::write_events_csv(report.events));
      rows.push_back({in.name, label, std::move(report)});
    }
  }
  manifest.emit(run_dir, "runtime/comparison.csv", comparison_csv(rows));
  manifest.save(run_dir);
  return rows;
}

void cmd_report(const ExperimentConfig &cfg, const fs::path &run_dir) {
  cfg.validate();
  Manifest manifest = Manifest::load(run_dir);

  std::string curves = "# adaskip-curves v" + std::to_string(io::kFormatVersion) + "\n" +
                       "run,n_skipped,config,accuracy,latency_cost,energy_cost,random_min,"
                       "random_mean,random_max,best_worst_gap\n";
  Json summary;
  summary["format"] = "adaskip-report-summary";
  summary["version"] = io::kFormatVersion;
  summary["manifest"] = "manifest.json";
  Json runs = Json::array();

  for (std::size_t r = 0; r < cfg.training.size(); ++r) {
    const TrainingRun &run = cfg.training[r];
    const LoadedRun loaded = load_run(manifest, run_dir, run);
    const io::PointFile points = io::read_points(
        manifest.load_verified(run_dir, run_path(run, "operating_points.json")));
    const std::size_t skippable = loaded.model.index_map.skippable_blocks();
    if (points.points.size() != skippable + 1) {
      throw ValidationError("incomplete_run",
                            run.name + "/operating_points.json does not cover N = 0..B_s");
    }
    const ConfigEvaluator evaluator(loaded.model, loaded.test);
    const auto stats = random_config_stats(evaluator, cfg.analysis.random_samples_per_n,
                                           derive_seed(cfg.analysis.random_seed, r));

    std::vector<double> family_acc;
    std::vector<double> random_mean;
    double widest_gap = 0.0;
    std::size_t widest_gap_n = 0;
    for (std::size_t n = 0; n <= skippable; ++n) {
      const OperatingPoint &p = points.points[n];
      const SkipCountStats &st = stats[n];
      const double best = std::max(st.max_accuracy, p.accuracy);
      const double worst = std::min(st.min_accuracy, p.accuracy);
      const double gap = best - worst;
      if (gap > widest_gap) {
        widest_gap = gap;
        widest_gap_n = n;
      }
      curves += run.name + "," + std::to_string(n) + "," + p.skip.to_string() + "," +
                io::format_double(p.accuracy) + "," + io::format_double(p.latency_cost) + "," +
                io::format_double(p.energy_cost) + "," + io::format_double(st.min_accuracy) + "," +
                io::format_double(st.mean_accuracy) + "," + io::format_double(st.max_accuracy) +
                "," + io::format_double(gap) + "\n";
      family_acc.push_back(p.accuracy);
      random_mean.push_back(st.mean_accuracy);
    }
    runs.push_back(Json{{"run", run.name},
                        {"mode", run.config.mode == TrainMode::baseline ? "baseline" : "stochastic"},
                        {"skippable_blocks", skippable},
                        {"full_accuracy", points.points.front().accuracy},
                        {"sensitivity_curve_area", accuracy_curve_area(family_acc)},
                        {"random_mean_curve_area", accuracy_curve_area(random_mean)},
                        {"widest_gap", widest_gap},
                        {"widest_gap_n_skipped", widest_gap_n}});
  }
  summary["runs"] = std::move(runs);
  manifest.emit(run_dir, "report/curves.csv", curves);
  manifest.emit(run_dir, "report/summary.json", io::dump_json(summary));
  manifest.save(run_dir);
}

void run_pipeline(const ExperimentConfig &cfg, const fs::path &run_dir) {
  cmd_train(cfg, run_dir);
  cmd_analyze(cfg, run_dir);
  cmd_simulate(cfg, run_dir);
  cmd_report(cfg, run_dir);
}

} // namespace adaskip
