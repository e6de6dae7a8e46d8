#include "doctest.h"

#include <filesystem>

#include "adaskip/datagen.hpp"
#include "adaskip/error.hpp"
#include "adaskip/io.hpp"
#include "test_support.hpp"

using namespace adaskip;
namespace t = adaskip::testing;

TEST_CASE("doubles print in shortest round-trip form") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(-2.5e-7) == "-2.5e-07");
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-20.0, 20.0));
    CHECK(io::parse_double(io::format_double(v)) == v);
  }
  CHECK_THROWS_AS(io::format_double(std::nan("")), ValidationError);
  CHECK_THROWS_AS(io::parse_double("1.5x"), ValidationError);
  CHECK_THROWS_AS(io::parse_double(""), ValidationError);
}

TEST_CASE("sha256") {
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("checkpoint round trip") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto model = init_model(t::small_spec(seed));
    t::scramble(model, seed * 10);
    const std::string text = io::write_checkpoint(model);
    const ResidualModel back = io::read_checkpoint(text);
    CHECK(back == model);
    CHECK(io::write_checkpoint(back) == text);
  }
  auto scaled = init_model(t::small_spec());
  scaled.branch_scale = {1.0, 0.75, 1.0, 0.5, 0.25};
  CHECK(io::read_checkpoint(io::write_checkpoint(scaled)) == scaled);
}

TEST_CASE("checkpoint validation") {
  const auto model = init_model(t::small_spec());
  io::Json j = io::Json::parse(io::write_checkpoint(model));

  auto wrong_format = j;
  wrong_format["format"] = "adaskip-dataset";
  CHECK_THROWS_AS(io::read_checkpoint(wrong_format.dump()), ValidationError);

  auto wrong_version = j;
  wrong_version["version"] = 2;
  CHECK_THROWS_AS(io::read_checkpoint(wrong_version.dump()), ValidationError);

  auto wrong_scheme = j;
  wrong_scheme["init_scheme"] = "other";
  CHECK_THROWS_AS(io::read_checkpoint(wrong_scheme.dump()), ValidationError);

  auto short_bias = j;
  short_bias["head"]["bias"].erase(0);
  CHECK_THROWS_AS(io::read_checkpoint(short_bias.dump()), ValidationError);

  auto missing = j;
  missing.erase("stem");
  CHECK_THROWS_AS(io::read_checkpoint(missing.dump()), ValidationError);

  CHECK_THROWS_AS(io::read_checkpoint("{not json"), ValidationError);
}

TEST_CASE("spec and config round trips") {
  const NetworkSpec spec = t::small_spec(5);
  CHECK(io::network_spec_from_json(io::network_spec_to_json(spec)) == spec);

  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.lr_schedule = default_lr_schedule(20, 0.02);
  cfg.mode = TrainMode::stochastic;
  cfg.p_last = 0.5;
  cfg.rng_seed = 99;
  CHECK(io::train_config_from_json(io::train_config_to_json(cfg)) == cfg);

  DatasetSpec d;
  d.generator = "rings";
  d.seed = 12;
  CHECK(io::dataset_spec_from_json(io::dataset_spec_to_json(d)) == d);
}

TEST_CASE("dataset csv round trip") {
  DatasetSpec d;
  d.num_classes = 4;
  d.input_dim = 5;
  d.train_size = 40;
  d.test_size = 20;
  d.seed = 3;
  for (const char *gen : {"spirals", "rings", "gaussian_mixture"}) {
    d.generator = gen;
    const auto pair = synthesize(d);
    for (const Dataset *ds : {&pair.train, &pair.test}) {
      const std::string text = io::write_dataset_csv(*ds);
      const Dataset back = io::read_dataset_csv(text);
      CHECK(back.features == ds->features);
      CHECK(back.labels == ds->labels);
      CHECK(back.num_classes == ds->num_classes);
      CHECK(back.split == ds->split);
      CHECK(io::write_dataset_csv(back) == text);
    }
  }
}

TEST_CASE("csv validation") {
  CHECK_THROWS_AS(io::read_trace_csv("t\n0\n1\n"), ValidationError);          // no preamble
  CHECK_THROWS_AS(io::read_trace_csv("# adaskip-trace v1\nx\n0\n"), ValidationError);
  CHECK_THROWS_AS(io::read_trace_csv("# adaskip-trace v1\nt\n1\n0\n"), ValidationError);
  CHECK_THROWS_AS(io::read_trace_csv("# adaskip-trace v1\nt\n"), ValidationError);
  CHECK_THROWS_AS(io::read_trace_csv("# adaskip-history v1\nt\n0\n"), ValidationError);
}

TEST_CASE("trace, history and event round trips") {
  const auto trace = generate_trace(300, 5.0, 0.25, 8);
  const std::string tt = io::write_trace_csv(trace.arrivals);
  CHECK(io::read_trace_csv(tt) == trace.arrivals);
  CHECK(io::write_trace_csv(io::read_trace_csv(tt)) == tt);

  std::vector<EpochStats> history{{0, 1.25, 0.4, 0.38}, {1, 0.9, 0.61, std::nullopt}};
  const std::string ht = io::write_history_csv(history);
  const auto hb = io::read_history_csv(ht);
  REQUIRE(hb.size() == 2);
  CHECK(hb[1].test_accuracy == std::nullopt);
  CHECK(io::write_history_csv(hb) == ht);

  const auto policy = RuntimePolicy::make(t::scripted_front(), 10.0, 0.5);
  const auto report = simulate(policy, trace.arrivals, ServiceModel{1.3});
  const std::string et = io::write_events_csv(report.events);
  CHECK(io::read_events_csv(et) == report.events);
  CHECK(io::write_events_csv(io::read_events_csv(et)) == et);

  const std::string rt = io::write_sim_report(report, policy);
  const auto rb = io::read_sim_report(rt);
  CHECK(rb.report.processed == report.processed);
  CHECK(rb.report.usage == report.usage);
  CHECK(io::write_sim_report(rb.report, rb.policy) == rt);
}

TEST_CASE("analysis artifact round trips") {
  const auto list = make_sensitivity_list({{0, 0.5}, {1, 0.75}, {2, 0.5}, {3, 0.125}});
  const std::string st = io::write_sensitivity(list);
  CHECK(io::read_sensitivity(st) == list);
  CHECK(io::write_sensitivity(io::read_sensitivity(st)) == st);

  io::PointFile pf;
  pf.kind = "pareto";
  pf.reference = {0.9, 10.0, 0.5};
  pf.points = t::scripted_front().points;
  const std::string pt = io::write_points(pf);
  const auto pb = io::read_points(pt);
  CHECK(pb.points == pf.points);
  CHECK(pb.reference == pf.reference);
  CHECK(io::write_points(pb) == pt);

  pf.kind = "operating_points";
  pf.points.push_back(t::make_point(0.3, 12, "0101")); // dominated is fine here
  CHECK(io::write_points(io::read_points(io::write_points(pf))) == io::write_points(pf));

  pf.kind = "pareto";
  CHECK_THROWS_AS(io::read_points(io::write_points(pf)), ValidationError);
  pf.kind = "other";
  CHECK_THROWS_AS(io::read_points(io::write_points(pf)), ValidationError);

  ParetoSet front = t::scripted_front();
  for (auto &p : front.points) {
    p.energy_cost = 2.0 * p.latency_cost;
  }
  const std::string rc = io::write_runtime_csv(front);
  CHECK(io::read_runtime_csv(rc, 2.0) == front);
  CHECK(io::write_runtime_csv(io::read_runtime_csv(rc, 2.0)) == rc);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "adaskip_io_test";
  std::filesystem::remove_all(dir);
  io::write_file(dir / "a" / "b.txt", "hello\n");
  CHECK(io::read_file(dir / "a" / "b.txt") == "hello\n");
  CHECK_THROWS_AS(io::read_file(dir / "missing.txt"), RuntimeError);
  std::filesystem::remove_all(dir);
}
