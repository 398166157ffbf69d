// Copyright (c) 2026 psrsched contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "psrsched/report_io.hpp"
#include "psrsched/scenario.hpp"

using namespace psrsched;
using nlohmann::json;

namespace {

json minimal_doc() {
  return json::parse(R"({
    "geometry": {
      "apartments": [
        {"xmin": 0, "ymin": 0, "xmax": 10, "ymax": 7},
        {"xmin": 17, "ymin": 0, "xmax": 27, "ymax": 7}
      ],
      "nonrta_ap": {"x": 9.5, "y": 3.5},
      "rta_ap": {"x": 17.5, "y": 3.5},
      "rta_stas": [{"x": 15.5, "y": 3.5}],
      "nonrta_stas": [{"x": 5.0, "y": 3.5}]
    }
  })");
}

}  // namespace

TEST_CASE("omitted sections fall back to the documented defaults") {
  const auto spec = parse_scenario(minimal_doc());
  const auto& c = spec.config;
  CHECK(c.link.channel_width_mhz == 20.0);
  CHECK(c.link.ap_tx_power_dbm == 20.0);
  CHECK(c.link.sta_tx_power_dbm == 15.0);
  CHECK(c.link.sinr_threshold_db == 3.0);
  CHECK(c.link.psr_safety_margin_db == 1.0);
  CHECK(c.t_rta_ms == 20.0);
  CHECK(c.rta_packet_bytes == 256);
  CHECK(c.nonrta_packet_bytes == 1000);
  CHECK(c.rta_mcs == 0);
  CHECK(c.nonrta_default_mcs == 8);
  CHECK(c.txop_duration_ms == 5.0);
  CHECK(c.delay_bound_ms == 20.0);
  CHECK(c.quantile == 0.999);
  CHECK(c.warmup_duration_s == 0.1 * c.sim_duration_s);
  CHECK(spec.root_seed == 1);
  CHECK(c.deployment.nonrta_stas.size() == 1);
  CHECK(c.deployment.nonrta_stas[0].mcs == 8);
  CHECK(c.deployment.nonrta_stas[0].allows_psr);
  CHECK(c.deployment.rta_stas[0].id == "rta-0");
  // Apartment membership is derived from the floor plan.
  CHECK(c.deployment.nonrta_ap.apartment == 0);
  CHECK(c.deployment.rta_ap.apartment == 1);
  CHECK(c.deployment.rta_stas[0].pos.apartment == -1);
}

TEST_CASE("unknown keys are rejected with their path") {
  auto doc = minimal_doc();
  doc["geometry"]["typo_key"] = 1;
  try {
    parse_scenario(doc);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("typo_key") != std::string::npos);
  }

  auto doc2 = minimal_doc();
  doc2["radio"] = {{"tx_power", 20}};
  CHECK_THROWS_AS(parse_scenario(doc2), ValidationError);

  auto doc3 = minimal_doc();
  doc3["extra_section"] = json::object();
  CHECK_THROWS_AS(parse_scenario(doc3), ValidationError);
}

TEST_CASE("favorability override must be rectangular and binary") {
  auto doc = minimal_doc();
  doc["favorability_override"] = {{1, 0, 1}, {0, 1, 0}};
  const auto spec = parse_scenario(doc);
  REQUIRE(spec.config.favorability_override.has_value());
  CHECK(spec.config.favorability_override->num_columns() == 3);
  CHECK(spec.config.favorability_override->num_rows() == 2);

  auto ragged = minimal_doc();
  ragged["favorability_override"] = {{1, 0, 1}, {0, 1}};
  CHECK_THROWS_AS(parse_scenario(ragged), ValidationError);

  auto nonbinary = minimal_doc();
  nonbinary["favorability_override"] = {{1, 2}};
  CHECK_THROWS_AS(parse_scenario(nonbinary), ValidationError);
}

TEST_CASE("file values beat defaults and flags beat file values") {
  auto doc = minimal_doc();
  doc["traffic"] = {{"t_rta_ms", 12.5}};
  doc["radio"] = {{"sinr_threshold_db", 4.0}};
  auto spec = parse_scenario(doc);
  CHECK(spec.config.t_rta_ms == 12.5);
  CHECK(spec.config.link.sinr_threshold_db == 4.0);

  ScenarioOverrides flags;
  flags.t_rta_ms = 25.0;
  flags.sinr_threshold_db = 6.0;
  flags.seed = 99;
  apply_overrides(spec, flags);
  CHECK(spec.config.t_rta_ms == 25.0);
  CHECK(spec.config.link.sinr_threshold_db == 6.0);
  CHECK(spec.root_seed == 99);
}

TEST_CASE("warmup tracks an overridden duration unless pinned") {
  auto doc = minimal_doc();
  doc["simulation"] = {{"sim_duration_s", 50.0}};
  auto spec = parse_scenario(doc);
  CHECK(spec.config.warmup_duration_s == 5.0);

  ScenarioOverrides flags;
  flags.sim_duration_s = 100.0;
  apply_overrides(spec, flags);
  CHECK(spec.config.warmup_duration_s == 10.0);

  auto doc2 = minimal_doc();
  doc2["simulation"] = {{"sim_duration_s", 50.0}, {"warmup_duration_s", 2.0}};
  auto spec2 = parse_scenario(doc2);
  apply_overrides(spec2, flags);
  CHECK(spec2.config.sim_duration_s == 100.0);
  CHECK(spec2.config.warmup_duration_s == 2.0);
}

TEST_CASE("random placement is seeded, in bounds, and clear of the APs") {
  auto doc = minimal_doc();
  doc["geometry"]["nonrta_stas"] = {{"random_count", 8}, {"placement_seed", 7}};
  const auto spec = parse_scenario(doc);
  REQUIRE(spec.placement.has_value());

  const auto cfg_a = placement_config(spec);
  const auto cfg_b = placement_config(spec);
  REQUIRE(cfg_a.deployment.nonrta_stas.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& sta = cfg_a.deployment.nonrta_stas[i];
    CHECK(sta.pos.x >= 0.0);
    CHECK(sta.pos.x <= 10.0);
    CHECK(sta.pos.y >= 0.0);
    CHECK(sta.pos.y <= 7.0);
    CHECK(sta.pos.apartment == 0);
    CHECK(distance_m(sta.pos, cfg_a.deployment.nonrta_ap) >= 0.5);
    CHECK(distance_m(sta.pos, cfg_a.deployment.rta_ap) >= 0.5);
    CHECK(sta.pos.x == cfg_b.deployment.nonrta_stas[i].pos.x);
    CHECK(sta.pos.y == cfg_b.deployment.nonrta_stas[i].pos.y);
  }

  // Placement index 0 resolves the file seed; other indices redraw.
  const auto cfg_1 = placement_config(spec, 1);
  const auto cfg_1b = placement_config(spec, 1);
  bool any_moved = false;
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(cfg_1.deployment.nonrta_stas[i].pos.x == cfg_1b.deployment.nonrta_stas[i].pos.x);
    any_moved = any_moved ||
                cfg_1.deployment.nonrta_stas[i].pos.x != cfg_a.deployment.nonrta_stas[i].pos.x;
  }
  CHECK(any_moved);
}

TEST_CASE("reference scenario matches the shipped files") {
  for (std::size_t m : {2u, 4u}) {
    const auto built = make_reference_scenario(m);
    const auto path = std::string(PSRSCHED_SCENARIO_DIR) + "/two_apartment_m" +
                      std::to_string(m) + ".json";
    const auto loaded = load_scenario_file(path);
    CHECK(config_digest(built.config) == config_digest(loaded.config));
    CHECK(built.root_seed == loaded.root_seed);
    REQUIRE(built.placement.has_value());
    REQUIRE(loaded.placement.has_value());
    CHECK(built.placement->count == loaded.placement->count);
    CHECK(built.placement->seed == loaded.placement->seed);
    CHECK(built.placement->apartment == loaded.placement->apartment);
  }
}

TEST_CASE("scenario files resolve through the config directory variable") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "psrsched_cfgdir_test";
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "envtest.json");
    f << minimal_doc().dump();
  }
  ::setenv("PSRSCHED_CONFIG_DIR", dir.c_str(), 1);
  CHECK_NOTHROW(load_scenario_file("envtest.json"));
  ::unsetenv("PSRSCHED_CONFIG_DIR");
  CHECK_THROWS_AS(load_scenario_file("envtest.json"), ValidationError);
  fs::remove_all(dir);
}

TEST_CASE("sim reports survive a JSON round trip") {
  SimReport r;
  r.seed = 42;
  r.config_digest = 0xDEADBEEFull;
  r.nonrta_bytes = {120000.0, 98000.5};
  r.nonrta_throughput_mbps = {11.7, 11.69321};
  r.rta_delays.delays_ms = {0.333, 7.25, 19.999999, 41.5};
  r.rta_delays.undelivered = 2;
  r.rta_generated = 6;
  r.rta_delivered = 4;
  r.events = {17, 3, 9};
  r.derived.delay_quantile_ms = std::numeric_limits<double>::infinity();
  r.derived.loss_ratio = 0.5;
  r.derived.avg_throughput_mbps = 11.696605;
  r.derived.jain = 0.99999871;

  const auto doc = json::parse(to_json(r).dump());
  CHECK(simreport_from_json(doc) == r);

  r.tb_sequence = std::vector<std::size_t>{0, 2, 1, 0, 2, 1};
  r.derived.delay_quantile_ms = 19.993710229;
  const auto doc2 = json::parse(to_json(r).dump());
  CHECK(simreport_from_json(doc2) == r);

  SimReport empty_metrics;
  empty_metrics.nonrta_bytes = {0.0};
  empty_metrics.nonrta_throughput_mbps = {0.0};
  const auto doc3 = json::parse(to_json(empty_metrics).dump());
  CHECK(simreport_from_json(doc3) == empty_metrics);
}

TEST_CASE("CSV quoting follows RFC 4180") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("with,comma") == "\"with,comma\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");
  CHECK(format_value(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_value(0.125) == "0.125");
}
