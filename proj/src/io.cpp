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

#include "adaskip/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "adaskip/error.hpp"

namespace adaskip::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Primitives

std::string format_double(double v) {
  if (!std::isfinite(v)) {
    throw ValidationError("non_finite_value", "cannot serialize a non-finite number");
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ValidationError("number_format", "not a finite number: '" + std::string(text) + "'");
  }
  return v;
}

namespace {

std::size_t parse_size(std::string_view text) {
  std::size_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ValidationError("number_format", "not an unsigned integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

// CSV artifacts: "# <format> v<version>[ key=value...]", a header, then rows.
struct CsvDoc {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::vector<std::string_view>> rows;

  const std::string &meta_value(std::string_view key) const {
    for (const auto &[k, v] : meta) {
      if (k == key) {
        return v;
      }
    }
    throw ValidationError("csv_format", "missing '" + std::string(key) + "' in CSV preamble");
  }
};

CsvDoc parse_csv(std::string_view text, std::string_view format, std::string_view header) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) {
    lines.pop_back();
  }
  if (lines.size() < 2) {
    throw ValidationError("csv_format", "CSV " + std::string(format) + " is truncated");
  }
  const auto preamble = split(lines[0], ' ');
  const std::string version = "v" + std::to_string(kFormatVersion);
  if (preamble.size() < 3 || preamble[0] != "#" || preamble[1] != format ||
      preamble[2] != version) {
    throw ValidationError("csv_format", "expected '# " + std::string(format) + " " + version +
                                            "' preamble");
  }
  CsvDoc doc;
  for (std::size_t i = 3; i < preamble.size(); ++i) {
    const auto eq = preamble[i].find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("csv_format", "malformed preamble entry");
    }
    doc.meta.emplace_back(std::string(preamble[i].substr(0, eq)),
                          std::string(preamble[i].substr(eq + 1)));
  }
  if (!header.empty() && lines[1] != header) {
    throw ValidationError("csv_format", "expected header '" + std::string(header) + "'");
  }
  const std::size_t columns = split(lines[1], ',').size();
  for (std::size_t i = 2; i < lines.size(); ++i) {
    auto cells = split(lines[i], ',');
    if (cells.size() != columns) {
      throw ValidationError("csv_format", "row " + std::to_string(i + 1) + " has " +
                                              std::to_string(cells.size()) + " cells, expected " +
                                              std::to_string(columns));
    }
    doc.rows.push_back(std::move(cells));
  }
  return doc;
}

std::string csv_preamble(std::string_view format) {
  return "# " + std::string(format) + " v" + std::to_string(kFormatVersion);
}

template <class T> T get_field(const Json &j, const char *key, std::string_view where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError("missing_field",
                          std::string(where) + "." + key + " is required");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception &) {
    throw ValidationError("field_type", std::string(where) + "." + key + " has the wrong type");
  }
}

Json affine_to_json(const Affine &a) {
  Json j;
  j["in"] = a.in_dim;
  j["out"] = a.out_dim;
  j["weight"] = a.weight;
  j["bias"] = a.bias;
  return j;
}

void affine_from_json(const Json &j, Affine &a, std::string_view where) {
  const auto in = get_field<std::size_t>(j, "in", where);
  const auto out = get_field<std::size_t>(j, "out", where);
  auto weight = get_field<std::vector<double>>(j, "weight", where);
  auto bias = get_field<std::vector<double>>(j, "bias", where);
  if (in != a.in_dim || out != a.out_dim || weight.size() != in * out || bias.size() != out) {
    throw ValidationError("checkpoint_shape", std::string(where) + " has the wrong shape");
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(weight.begin(), weight.end(), finite) ||
      !std::all_of(bias.begin(), bias.end(), finite)) {
    throw ValidationError("checkpoint_values", std::string(where) + " has non-finite weights");
  }
  a.weight = std::move(weight);
  a.bias = std::move(bias);
}

Json header(std::string_view format) {
  Json j;
  j["format"] = format;
  j["version"] = kFormatVersion;
  return j;
}

const char *mode_name(TrainMode mode) {
  return mode == TrainMode::baseline ? "baseline" : "stochastic";
}

} // namespace

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw RuntimeError("io", "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path &path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw RuntimeError("io", "cannot write " + path.string());
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) {
    throw RuntimeError("io", "short write to " + path.string());
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw RuntimeError("digest", "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

Json parse_json(std::string_view text, std::string_view expected_format) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ValidationError("json_syntax", e.what());
  }
  if (!expected_format.empty()) {
    const auto format = get_field<std::string>(j, "format", "document");
    const auto version = get_field<int>(j, "version", "document");
    if (format != expected_format) {
      throw ValidationError("format_mismatch", "expected a " + std::string(expected_format) +
                                                   " document, got " + format);
    }
    if (version != kFormatVersion) {
      throw ValidationError("format_version", "unsupported " + format + " version " +
                                                  std::to_string(version));
    }
  }
  return j;
}

std::string dump_json(const Json &doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Specs and configs

Json network_spec_to_json(const NetworkSpec &spec) {
  Json j;
  j["input_dim"] = spec.input_dim;
  j["num_classes"] = spec.num_classes;
  Json segs = Json::array();
  for (const auto &s : spec.segments) {
    segs.push_back(Json{{"blocks", s.blocks}, {"width", s.width}});
  }
  j["segments"] = segs;
  j["activation"] = "relu";
  j["init_seed"] = spec.init_seed;
  return j;
}

NetworkSpec network_spec_from_json(const Json &j) {
  NetworkSpec spec;
  spec.input_dim = get_field<std::size_t>(j, "input_dim", "model");
  spec.num_classes = get_field<std::size_t>(j, "num_classes", "model");
  const auto segs = get_field<Json>(j, "segments", "model");
  if (!segs.is_array()) {
    throw ValidationError("field_type", "model.segments must be an array");
  }
  for (const auto &s : segs) {
    spec.segments.push_back({get_field<std::size_t>(s, "blocks", "model.segments[]"),
                             get_field<std::size_t>(s, "width", "model.segments[]")});
  }
  if (j.contains("activation") && j.at("activation") != "relu") {
    throw ValidationError("invalid_spec", "only relu activation is supported");
  }
  spec.init_seed = get_field<std::uint64_t>(j, "init_seed", "model");
  spec.validate();
  return spec;
}

Json train_config_to_json(const TrainConfig &cfg) {
  Json j;
  j["mode"] = mode_name(cfg.mode);
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  if (cfg.p_last) {
    j["p_L"] = *cfg.p_last;
  }
  j["rng_seed"] = cfg.rng_seed;
  j["test_time_scaling"] = cfg.test_time_scaling;
  Json phases = Json::array();
  for (const auto &p : cfg.lr_schedule) {
    phases.push_back(Json{{"begin", p.begin_epoch}, {"end", p.end_epoch}, {"lr", p.lr}});
  }
  j["lr_schedule"] = phases;
  return j;
}

TrainConfig train_config_from_json(const Json &j) {
  TrainConfig cfg;
  const auto mode = get_field<std::string>(j, "mode", "training");
  if (mode == "baseline") {
    cfg.mode = TrainMode::baseline;
  } else if (mode == "stochastic") {
    cfg.mode = TrainMode::stochastic;
  } else {
    throw ValidationError("train_config", "unknown training mode '" + mode + "'");
  }
  cfg.epochs = get_field<std::size_t>(j, "epochs", "training");
  cfg.batch_size = get_field<std::size_t>(j, "batch_size", "training");
  cfg.rng_seed = get_field<std::uint64_t>(j, "rng_seed", "training");
  if (j.contains("p_L")) {
    cfg.p_last = get_field<double>(j, "p_L", "training");
  }
  if (j.contains("test_time_scaling")) {
    cfg.test_time_scaling = get_field<bool>(j, "test_time_scaling", "training");
  }
  if (j.contains("lr_schedule")) {
    for (const auto &p : get_field<Json>(j, "lr_schedule", "training")) {
      cfg.lr_schedule.push_back({get_field<std::size_t>(p, "begin", "training.lr_schedule[]"),
                                 get_field<std::size_t>(p, "end", "training.lr_schedule[]"),
                                 get_field<double>(p, "lr", "training.lr_schedule[]")});
    }
  } else {
    const double base = j.contains("base_lr") ? get_field<double>(j, "base_lr", "training") : 0.1;
    cfg.lr_schedule = default_lr_schedule(cfg.epochs, base);
  }
  cfg.validate();
  return cfg;
}

Json dataset_spec_to_json(const DatasetSpec &spec) {
  Json j;
  j["generator"] = spec.generator;
  j["num_classes"] = spec.num_classes;
  j["input_dim"] = spec.input_dim;
  j["train_size"] = spec.train_size;
  j["test_size"] = spec.test_size;
  j["noise"] = spec.noise;
  j["seed"] = spec.seed;
  return j;
}

DatasetSpec dataset_spec_from_json(const Json &j) {
  DatasetSpec spec;
  spec.generator = get_field<std::string>(j, "generator", "dataset");
  spec.num_classes = get_field<std::size_t>(j, "num_classes", "dataset");
  spec.input_dim = get_field<std::size_t>(j, "input_dim", "dataset");
  spec.train_size = get_field<std::size_t>(j, "train_size", "dataset");
  spec.test_size = get_field<std::size_t>(j, "test_size", "dataset");
  spec.noise = get_field<double>(j, "noise", "dataset");
  spec.seed = get_field<std::uint64_t>(j, "seed", "dataset");
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Checkpoint

std::string write_checkpoint(const ResidualModel &model) {
  Json j = header("adaskip-checkpoint");
  j["init_scheme"] = kInitScheme;
  j["spec"] = network_spec_to_json(model.spec);
  j["branch_scale"] = model.branch_scale;
  j["stem"] = affine_to_json(model.params.stem);
  Json blocks = Json::array();
  for (const auto &b : model.params.blocks) {
    Json jb;
    jb["segment"] = b.segment;
    jb["transition"] = b.transition ? affine_to_json(*b.transition) : Json(nullptr);
    jb["first"] = affine_to_json(b.first);
    jb["second"] = affine_to_json(b.second);
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  j["head"] = affine_to_json(model.params.head);
  return dump_json(j);
}

ResidualModel read_checkpoint(std::string_view text) {
  const Json j = parse_json(text, "adaskip-checkpoint");
  const auto scheme = get_field<std::string>(j, "init_scheme", "checkpoint");
  if (scheme != kInitScheme) {
    throw ValidationError("checkpoint_scheme", "checkpoint uses init scheme " + scheme);
  }
  // The skeleton fixes every shape; the file supplies the values.
  ResidualModel model = init_model(network_spec_from_json(get_field<Json>(j, "spec", "checkpoint")));
  model.branch_scale = get_field<std::vector<double>>(j, "branch_scale", "checkpoint");
  if (!model.branch_scale.empty() &&
      model.branch_scale.size() != model.index_map.total_blocks()) {
    throw ValidationError("checkpoint_shape", "branch_scale length != B");
  }
  affine_from_json(get_field<Json>(j, "stem", "checkpoint"), model.params.stem, "stem");
  const auto blocks = get_field<Json>(j, "blocks", "checkpoint");
  if (!blocks.is_array() || blocks.size() != model.params.blocks.size()) {
    throw ValidationError("checkpoint_shape", "checkpoint block count != B");
  }
  for (std::size_t g = 0; g < blocks.size(); ++g) {
    const std::string where = "blocks[" + std::to_string(g) + "]";
    Block &b = model.params.blocks[g];
    const Json &jb = blocks[g];
    if (get_field<std::size_t>(jb, "segment", where) != b.segment) {
      throw ValidationError("checkpoint_shape", where + " is in the wrong segment");
    }
    const Json transition = get_field<Json>(jb, "transition", where);
    if (transition.is_null() != !b.transition) {
      throw ValidationError("checkpoint_shape", where + " transition presence mismatch");
    }
    if (b.transition) {
      affine_from_json(transition, *b.transition, where + ".transition");
    }
    affine_from_json(get_field<Json>(jb, "first", where), b.first, where + ".first");
    affine_from_json(get_field<Json>(jb, "second", where), b.second, where + ".second");
  }
  affine_from_json(get_field<Json>(j, "head", "checkpoint"), model.params.head, "head");
  return model;
}

// ---------------------------------------------------------------------------
// Datasets, traces, histories

std::string write_dataset_csv(const Dataset &data) {
  std::string out = csv_preamble("adaskip-dataset") +
                    " split=" + (data.split == Split::train ? "train" : "test") +
                    " num_classes=" + std::to_string(data.num_classes) + "\n";
  out += "label";
  for (std::size_t i = 0; i < data.features.cols(); ++i) {
    out += ",x" + std::to_string(i);
  }
  out += "\n";
  for (std::size_t s = 0; s < data.size(); ++s) {
    out += std::to_string(data.labels[s]);
    for (double v : data.features.row(s)) {
      out += ",";
      out += format_double(v);
    }
    out += "\n";
  }
  return out;
}

Dataset read_dataset_csv(std::string_view text) {
  const CsvDoc doc = parse_csv(text, "adaskip-dataset", "");
  Dataset d;
  const std::string &split_name = doc.meta_value("split");
  if (split_name != "train" && split_name != "test") {
    throw ValidationError("csv_format", "dataset split must be train or test");
  }
  d.split = split_name == "train" ? Split::train : Split::test;
  d.num_classes = parse_size(doc.meta_value("num_classes"));
  if (doc.rows.empty() || doc.rows.front().size() < 2) {
    throw ValidationError("empty_dataset", "dataset file has no examples");
  }
  const std::size_t dim = doc.rows.front().size() - 1;
  d.features = Matrix(doc.rows.size(), dim);
  for (std::size_t s = 0; s < doc.rows.size(); ++s) {
    d.labels.push_back(static_cast<int>(parse_size(doc.rows[s][0])));
    for (std::size_t i = 0; i < dim; ++i) {
      d.features(s, i) = parse_double(doc.rows[s][i + 1]);
    }
  }
  d.validate();
  return d;
}

std::string write_trace_csv(std::span<const double> arrivals) {
  std::string out = csv_preamble("adaskip-trace") + "\nt\n";
  for (double t : arrivals) {
    out += format_double(t);
    out += "\n";
  }
  return out;
}

std::vector<double> read_trace_csv(std::string_view text) {
  const CsvDoc doc = parse_csv(text, "adaskip-trace", "t");
  std::vector<double> arrivals;
  for (const auto &row : doc.rows) {
    arrivals.push_back(parse_double(row[0]));
  }
  if (arrivals.empty()) {
    throw ValidationError("trace_format", "trace has no arrivals");
  }
  validate_trace(arrivals);
  return arrivals;
}

std::string write_history_csv(std::span<const EpochStats> history) {
  std::string out = csv_preamble("adaskip-history") + "\nepoch,loss,train_acc,test_acc\n";
  for (const auto &h : history) {
    out += std::to_string(h.epoch) + "," + format_double(h.loss) + "," +
           format_double(h.train_accuracy) + "," +
           (h.test_accuracy ? format_double(*h.test_accuracy) : std::string()) + "\n";
  }
  return out;
}

std::vector<EpochStats> read_history_csv(std::string_view text) {
  const CsvDoc doc = parse_csv(text, "adaskip-history", "epoch,loss,train_acc,test_acc");
  std::vector<EpochStats> history;
  for (const auto &row : doc.rows) {
    EpochStats h;
    h.epoch = parse_size(row[0]);
    h.loss = parse_double(row[1]);
    h.train_accuracy = parse_double(row[2]);
    if (!row[3].empty()) {
      h.test_accuracy = parse_double(row[3]);
    }
    history.push_back(h);
  }
  return history;
}

// ---------------------------------------------------------------------------
// Analysis artifacts

std::string write_sensitivity(const SensitivityList &list) {
  Json j = header("adaskip-sensitivity");
  j["manifest"] = "manifest.json";
  Json entries = Json::array();
  for (const auto &e : list.entries) {
    entries.push_back(Json{{"skip_index", e.skip_index}, {"accuracy", e.accuracy}});
  }
  j["entries"] = std::move(entries);
  return dump_json(j);
}

SensitivityList read_sensitivity(std::string_view text) {
  const Json j = parse_json(text, "adaskip-sensitivity");
  SensitivityList list;
  for (const auto &e : get_field<Json>(j, "entries", "sensitivity")) {
    list.entries.push_back({get_field<std::size_t>(e, "skip_index", "sensitivity.entries[]"),
                            get_field<double>(e, "accuracy", "sensitivity.entries[]")});
  }
  list.validate(list.entries.size());
  return list;
}

std::string write_points(const PointFile &file) {
  Json j = header("adaskip-points");
  j["kind"] = file.kind;
  j["manifest"] = "manifest.json";
  j["reference"] = Json{{"full_accuracy", file.reference.full_accuracy},
                        {"full_latency_cost", file.reference.full_latency_cost},
                        {"energy_per_mac", file.reference.energy_per_mac}};
  Json pts = Json::array();
  for (const auto &p : file.points) {
    pts.push_back(Json{{"config", p.skip.to_string()},
                       {"n_skipped", p.n_skipped},
                       {"accuracy", p.accuracy},
                       {"latency_cost", p.latency_cost},
                       {"energy_cost", p.energy_cost}});
  }
  j["points"] = std::move(pts);
  return dump_json(j);
}

PointFile read_points(std::string_view text) {
  const Json j = parse_json(text, "adaskip-points");
  PointFile file;
  file.kind = get_field<std::string>(j, "kind", "points");
  if (file.kind != "operating_points" && file.kind != "pareto") {
    throw ValidationError("points_kind", "unknown point file kind '" + file.kind + "'");
  }
  const Json ref = get_field<Json>(j, "reference", "points");
  file.reference.full_accuracy = get_field<double>(ref, "full_accuracy", "points.reference");
  file.reference.full_latency_cost =
      get_field<double>(ref, "full_latency_cost", "points.reference");
  file.reference.energy_per_mac = get_field<double>(ref, "energy_per_mac", "points.reference");
  for (const auto &p : get_field<Json>(j, "points", "points")) {
    OperatingPoint pt;
    pt.skip = SkipConfig::parse(get_field<std::string>(p, "config", "points[]"));
    pt.n_skipped = get_field<std::size_t>(p, "n_skipped", "points[]");
    pt.accuracy = get_field<double>(p, "accuracy", "points[]");
    pt.latency_cost = get_field<double>(p, "latency_cost", "points[]");
    pt.energy_cost = get_field<double>(p, "energy_cost", "points[]");
    if (pt.n_skipped != pt.skip.n_skipped()) {
      throw ValidationError("points_invalid", "n_skipped disagrees with config bits");
    }
    file.points.push_back(std::move(pt));
  }
  if (file.kind == "pareto") {
    ParetoSet{file.points}.validate();
  }
  return file;
}

std::string write_runtime_csv(const ParetoSet &front) {
  front.validate();
  std::string out = csv_preamble("adaskip-pareto-runtime") + "\nconfig,accuracy,latency_cost\n";
  for (const auto &p : front.points) {
    out += p.skip.to_string() + "," + format_double(p.accuracy) + "," +
           format_double(p.latency_cost) + "\n";
  }
  return out;
}

ParetoSet read_runtime_csv(std::string_view text, double energy_per_mac) {
  const CsvDoc doc = parse_csv(text, "adaskip-pareto-runtime", "config,accuracy,latency_cost");
  ParetoSet front;
  for (const auto &row : doc.rows) {
    OperatingPoint p;
    p.skip = SkipConfig::parse(row[0]);
    p.n_skipped = p.skip.n_skipped();
    p.accuracy = parse_double(row[1]);
    p.latency_cost = parse_double(row[2]);
    p.energy_cost = energy_per_mac * p.latency_cost;
    front.points.push_back(std::move(p));
  }
  front.validate();
  return front;
}

// ---------------------------------------------------------------------------
// Simulation

std::string write_sim_report(const SimReport &report, const RuntimePolicy &policy) {
  Json j = header("adaskip-sim-report");
  j["manifest"] = "manifest.json";
  Json configs = Json::array();
  for (const auto &p : policy.pareto.points) {
    configs.push_back(p.skip.to_string());
  }
  j["policy"] = Json{{"delta_req", policy.delta_req},
                     {"min_acc", policy.min_acc},
                     {"configs", configs}};
  j["requests"] = report.processed + report.dropped;
  j["processed"] = report.processed;
  j["dropped"] = report.dropped;
  j["average_accuracy"] = report.average_accuracy;
  j["total_cost"] = report.total_cost;
  j["inferences_per_cost"] = report.inferences_per_cost;
  j["increases"] = report.increases;
  j["decreases"] = report.decreases;
  Json usage = Json::array();
  for (std::size_t i = 0; i < report.usage.size(); ++i) {
    usage.push_back(Json{{"index", i},
                         {"config", policy.pareto.points[i].skip.to_string()},
                         {"accuracy", policy.pareto.points[i].accuracy},
                         {"processed", report.usage[i]}});
  }
  j["usage"] = std::move(usage);
  return dump_json(j);
}

SimReportFile read_sim_report(std::string_view text) {
  const Json j = parse_json(text, "adaskip-sim-report");
  SimReportFile f;
  const Json policy = get_field<Json>(j, "policy", "sim_report");
  f.policy.delta_req = get_field<double>(policy, "delta_req", "sim_report.policy");
  f.policy.min_acc = get_field<double>(policy, "min_acc", "sim_report.policy");
  for (const auto &c : get_field<Json>(policy, "configs", "sim_report.policy")) {
    OperatingPoint p;
    p.skip = SkipConfig::parse(c.get<std::string>());
    p.n_skipped = p.skip.n_skipped();
    f.policy.pareto.points.push_back(std::move(p));
  }
  SimReport &r = f.report;
  r.processed = get_field<std::size_t>(j, "processed", "sim_report");
  r.dropped = get_field<std::size_t>(j, "dropped", "sim_report");
  if (get_field<std::size_t>(j, "requests", "sim_report") != r.processed + r.dropped) {
    throw ValidationError("sim_report", "requests != processed + dropped");
  }
  r.average_accuracy = get_field<double>(j, "average_accuracy", "sim_report");
  r.total_cost = get_field<double>(j, "total_cost", "sim_report");
  r.inferences_per_cost = get_field<double>(j, "inferences_per_cost", "sim_report");
  r.increases = get_field<std::size_t>(j, "increases", "sim_report");
  r.decreases = get_field<std::size_t>(j, "decreases", "sim_report");
  const Json usage = get_field<Json>(j, "usage", "sim_report");
  if (usage.size() != f.policy.pareto.points.size()) {
    throw ValidationError("sim_report", "usage does not match the policy configs");
  }
  for (std::size_t i = 0; i < usage.size(); ++i) {
    auto &p = f.policy.pareto.points[i];
    if (get_field<std::string>(usage[i], "config", "sim_report.usage[]") != p.skip.to_string()) {
      throw ValidationError("sim_report", "usage does not match the policy configs");
    }
    p.accuracy = get_field<double>(usage[i], "accuracy", "sim_report.usage[]");
    r.usage.push_back(get_field<std::size_t>(usage[i], "processed", "sim_report.usage[]"));
  }
  return f;
}

std::string write_events_csv(std::span<const EventRecord> events) {
  std::string out = csv_preamble("adaskip-events") + "\nt,action,index,config,idle_decrease\n";
  for (const auto &e : events) {
    out += format_double(e.t) + "," + (e.action == Action::processed ? "processed" : "dropped") +
           "," + std::to_string(e.index) + "," + e.config_bits + "," +
           (e.idle_decrease ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<EventRecord> read_events_csv(std::string_view text) {
  const CsvDoc doc =
      parse_csv(text, "adaskip-events", "t,action,index,config,idle_decrease");
  std::vector<EventRecord> events;
  for (const auto &row : doc.rows) {
    EventRecord e;
    e.t = parse_double(row[0]);
    if (row[1] == "processed") {
      e.action = Action::processed;
    } else if (row[1] == "dropped") {
      e.action = Action::dropped;
    } else {
      throw ValidationError("csv_format", "unknown event action '" + std::string(row[1]) + "'");
    }
    e.index = parse_size(row[2]);
    e.config_bits = SkipConfig::parse(row[3]).to_string();
    if (row[4] != "0" && row[4] != "1") {
      throw ValidationError("csv_format", "idle_decrease must be 0 or 1");
    }
    e.idle_decrease = row[4] == "1";
    events.push_back(std::move(e));
  }
  return events;
}

} // namespace adaskip::io
