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

// adaskip command line. Exit codes: 0 success, 2 validation error, 3 runtime
// error. Failures print exactly one line to stderr:
//
//   adaskip: error: <code>: <message>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "adaskip/error.hpp"
#include "adaskip/pipeline.hpp"

namespace fs = std::filesystem;
using namespace adaskip;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::string one_line(std::string text) {
  for (char &c : text) {
    if (c == '\n' || c == '\r') {
      c = ' ';
    }
  }
  return text;
}

int fail(const std::string &code, const std::string &message, int exit_code) {
  std::cerr << "adaskip: error: " << code << ": " << one_line(message) << "\n";
  return exit_code;
}

struct CommonArgs {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App *cmd, CommonArgs &args) {
  cmd->add_option("--config", args.config, "Experiment config (JSON)")->required();
  cmd->add_option("--out-dir", args.out_dir,
                  "Run directory (default: $ADASKIP_OUT_ROOT/<config name>, else runs/<config name>)");
  cmd->add_option("--seed", args.seed, "Override model and training seeds");
}

fs::path resolve_out_dir(const CommonArgs &args) {
  if (!args.out_dir.empty()) {
    return args.out_dir;
  }
  const char *root = std::getenv("ADASKIP_OUT_ROOT");
  const fs::path base = root != nullptr && *root != '\0' ? fs::path(root) : fs::path("runs");
  return base / fs::path(args.config).stem();
}

ExperimentConfig load(const CommonArgs &args) {
  ExperimentConfig cfg = load_experiment(args.config);
  if (args.seed) {
    apply_seed_override(cfg, *args.seed);
  }
  return cfg;
}

void print_comparison(const std::vector<ComparisonRow> &rows) {
  std::printf("%-12s %-9s %9s %8s %9s %14s\n", "run", "runtime", "processed", "dropped",
              "avg_acc", "inf_per_cost");
  for (const auto &r : rows) {
    std::printf("%-12s %-9s %9zu %8zu %9.4f %14.6g\n", r.run.c_str(), r.runtime.c_str(),
                r.report.processed, r.report.dropped, r.report.average_accuracy,
                r.report.inferences_per_cost);
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"adaskip: skip-resilient residual models and load-adaptive serving"};
  app.require_subcommand(1);

  CommonArgs train_args;
  auto *train_cmd = app.add_subcommand("train", "Train every configured run (baseline/stochastic)");
  add_common(train_cmd, train_args);

  CommonArgs analyze_args;
  auto *analyze_cmd = app.add_subcommand("analyze", "Sensitivity scan and Pareto front per run");
  add_common(analyze_cmd, analyze_args);

  CommonArgs simulate_args;
  std::string sim_pareto;
  std::string sim_trace;
  std::optional<double> sim_delta;
  std::optional<double> sim_min_acc;
  auto *simulate_cmd = app.add_subcommand("simulate", "Adaptive vs static serving simulation");
  add_common(simulate_cmd, simulate_args);
  simulate_cmd->add_option("--pareto", sim_pareto, "Serve this front (pareto.json or runtime CSV)");
  simulate_cmd->add_option("--trace", sim_trace, "Arrival trace CSV instead of the generator");
  simulate_cmd->add_option("--delta-req", sim_delta, "Idle threshold in virtual seconds");
  simulate_cmd->add_option("--min-acc", sim_min_acc, "Minimum acceptable accuracy (fraction)");

  CommonArgs report_args;
  auto *report_cmd = app.add_subcommand("report", "Accuracy/cost curves for plotting");
  add_common(report_cmd, report_args);

  CommonArgs run_args;
  auto *run_cmd = app.add_subcommand("run", "train, analyze, simulate and report in one go");
  add_common(run_cmd, run_args);

  std::string pareto_points;
  std::string pareto_out;
  std::string pareto_csv;
  std::optional<double> pareto_min_acc;
  auto *pareto_cmd = app.add_subcommand("pareto", "Filter operating points to a Pareto front");
  pareto_cmd->add_option("--points", pareto_points, "operating_points.json")->required();
  pareto_cmd->add_option("--out", pareto_out, "Output Pareto JSON")->required();
  pareto_cmd->add_option("--runtime-csv", pareto_csv, "Output runtime CSV (default: next to --out)");
  pareto_cmd->add_option("--min-acc", pareto_min_acc, "Also drop points at or below this accuracy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return fail("usage", e.what(), kExitValidation);
  }

  try {
    if (*train_cmd) {
      const fs::path dir = resolve_out_dir(train_args);
      cmd_train(load(train_args), dir);
      std::printf("trained into %s\n", dir.string().c_str());
    } else if (*analyze_cmd) {
      const fs::path dir = resolve_out_dir(analyze_args);
      const AnalyzeSummary summary = cmd_analyze(load(analyze_args), dir);
      for (const auto &r : summary.runs) {
        std::printf("%s: B_s=%zu evaluations=%zu pareto_points=%zu\n", r.name.c_str(), r.skippable,
                    r.evaluations, r.front_size);
      }
    } else if (*simulate_cmd) {
      SimulateOverrides overrides;
      if (!sim_pareto.empty()) {
        overrides.pareto_file = sim_pareto;
      }
      if (!sim_trace.empty()) {
        overrides.trace_file = sim_trace;
      }
      overrides.delta_req = sim_delta;
      overrides.min_acc = sim_min_acc;
      print_comparison(cmd_simulate(load(simulate_args), resolve_out_dir(simulate_args), overrides));
    } else if (*report_cmd) {
      const fs::path dir = resolve_out_dir(report_args);
      cmd_report(load(report_args), dir);
      std::printf("wrote %s\n", (dir / "report" / "curves.csv").string().c_str());
    } else if (*run_cmd) {
      const fs::path dir = resolve_out_dir(run_args);
      run_pipeline(load(run_args), dir);
      std::printf("pipeline complete: %s\n", dir.string().c_str());
    } else if (*pareto_cmd) {
      const fs::path out = pareto_out;
      const fs::path csv =
          pareto_csv.empty() ? fs::path(out).replace_extension(".csv") : fs::path(pareto_csv);
      const ParetoSet front = cmd_pareto(pareto_points, pareto_min_acc, out, csv);
      std::printf("%zu Pareto points -> %s, %s\n", front.points.size(), out.string().c_str(),
                  csv.string().c_str());
    }
  } catch (const ValidationError &e) {
    return fail(e.code(), e.what(), kExitValidation);
  } catch (const RuntimeError &e) {
    return fail(e.code(), e.what(), kExitRuntime);
  } catch (const std::exception &e) {
    return fail("internal", e.what(), kExitRuntime);
  }
  return 0;
}
