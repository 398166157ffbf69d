// Copyright (c) 2026 psrsched contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psrsched/random.hpp"
#include "psrsched/sim.hpp"

namespace psrsched {

/// Seeded uniform scattering of non-RTA stations inside one apartment,
/// replacing an explicit station list.
struct RandomPlacement {
  std::size_t count = 8;
  int apartment = 0;
  std::uint64_t seed = 1;
  int mcs = 8;
  bool allows_psr = true;
};

/// A scenario document as loaded from disk: the concrete configuration plus
/// the floor plan and any pending placement randomization.
struct ScenarioSpec {
  ScenarioConfig config;
  FloorPlan plan;
  std::optional<RandomPlacement> placement;
  std::uint64_t root_seed = 1;
};

/// Command-line values that beat file values, which beat built-in defaults.
struct ScenarioOverrides {
  std::optional<double> t_rta_ms;
  std::optional<double> sinr_threshold_db;
  std::optional<double> sim_duration_s;
  std::optional<double> warmup_duration_s;
  std::optional<std::size_t> classification_window;
  std::optional<std::uint64_t> seed;
};

namespace scenario_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& msg) { throw ValidationError("scenario: " + msg); }

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(path + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail("unknown key '" + path + "." + key + "'");
  }
}

inline double num(const json& obj, const std::string& path, const char* key,
                  double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) fail("'" + path + "." + key + "' must be a number");
  return v.get<double>();
}

inline std::int64_t integer(const json& obj, const std::string& path, const char* key,
                            std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail("'" + path + "." + key + "' must be an integer");
  return v.get<std::int64_t>();
}

inline bool boolean(const json& obj, const std::string& path, const char* key,
                    bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) fail("'" + path + "." + key + "' must be a boolean");
  return v.get<bool>();
}

inline std::string text(const json& obj, const std::string& path, const char* key,
                        const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) fail("'" + path + "." + key + "' must be a string");
  return v.get<std::string>();
}

/// Maps keyed by MCS index arrive as JSON objects with digit-string keys.
inline void mcs_map(const json& obj, const std::string& path, const char* key,
                    std::map<int, double>& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_object()) fail("'" + path + "." + key + "' must be an object");
  out.clear();
  for (const auto& [k, val] : v.items()) {
    if (k.empty() || k.find_first_not_of("0123456789") != std::string::npos)
      fail("'" + path + "." + key + "' keys must be MCS indices, got '" + k + "'");
    if (!val.is_number()) fail("'" + path + "." + key + "." + k + "' must be a number");
    out[std::stoi(k)] = val.get<double>();
  }
}

inline NodePosition node(const json& obj, const std::string& path, const FloorPlan& plan) {
  check_keys(obj, path, {"x", "y"});
  if (!obj.contains("x") || !obj.contains("y")) fail("'" + path + "' needs x and y");
  return plan.place(num(obj, path, "x", 0.0), num(obj, path, "y", 0.0));
}

}  // namespace scenario_detail

/// Parses and validates a scenario document. Unknown keys are rejected;
/// omitted values fall back to the built-in defaults.
inline ScenarioSpec parse_scenario(const nlohmann::json& doc) {
  namespace sd = scenario_detail;
  ScenarioSpec spec;
  sd::check_keys(doc, "scenario",
                 {"geometry", "radio", "traffic", "simulation", "favorability_override"});

  if (doc.contains("geometry")) {
    const auto& g = doc.at("geometry");
    sd::check_keys(g, "geometry",
                   {"apartments", "nonrta_ap", "rta_ap", "rta_stas", "nonrta_stas"});
    if (g.contains("apartments")) {
      if (!g.at("apartments").is_array()) sd::fail("geometry.apartments must be an array");
      for (const auto& a : g.at("apartments")) {
        sd::check_keys(a, "geometry.apartments[]", {"xmin", "ymin", "xmax", "ymax"});
        Rect r{sd::num(a, "apartments[]", "xmin", 0.0), sd::num(a, "apartments[]", "ymin", 0.0),
               sd::num(a, "apartments[]", "xmax", 0.0), sd::num(a, "apartments[]", "ymax", 0.0)};
        if (!(r.xmax > r.xmin && r.ymax > r.ymin))
          sd::fail("geometry.apartments[] rectangle is degenerate");
        spec.plan.apartments.push_back(r);
      }
    }
    if (g.contains("nonrta_ap"))
      spec.config.deployment.nonrta_ap = sd::node(g.at("nonrta_ap"), "geometry.nonrta_ap", spec.plan);
    if (g.contains("rta_ap"))
      spec.config.deployment.rta_ap = sd::node(g.at("rta_ap"), "geometry.rta_ap", spec.plan);
    if (g.contains("rta_stas")) {
      if (!g.at("rta_stas").is_array()) sd::fail("geometry.rta_stas must be an array");
      std::size_t idx = 0;
      for (const auto& s : g.at("rta_stas")) {
        sd::check_keys(s, "geometry.rta_stas[]", {"x", "y", "id"});
        RtaSta sta;
        sta.pos = spec.plan.place(sd::num(s, "rta_stas[]", "x", 0.0),
                                  sd::num(s, "rta_stas[]", "y", 0.0));
        sta.id = sd::text(s, "rta_stas[]", "id", "rta-" + std::to_string(idx));
        spec.config.deployment.rta_stas.push_back(std::move(sta));
        ++idx;
      }
    }
    if (g.contains("nonrta_stas")) {
      const auto& ns = g.at("nonrta_stas");
      if (ns.is_array()) {
        std::size_t idx = 0;
        for (const auto& s : ns) {
          sd::check_keys(s, "geometry.nonrta_stas[]", {"x", "y", "mcs", "allows_psr", "id"});
          NonRtaSta sta;
          sta.pos = spec.plan.place(sd::num(s, "nonrta_stas[]", "x", 0.0),
                                    sd::num(s, "nonrta_stas[]", "y", 0.0));
          sta.mcs = static_cast<int>(sd::integer(s, "nonrta_stas[]", "mcs", 8));
          sta.allows_psr = sd::boolean(s, "nonrta_stas[]", "allows_psr", true);
          sta.id = sd::text(s, "nonrta_stas[]", "id", "non-rta-" + std::to_string(idx));
          spec.config.deployment.nonrta_stas.push_back(std::move(sta));
          ++idx;
        }
      } else if (ns.is_object()) {
        sd::check_keys(ns, "geometry.nonrta_stas",
                       {"random_count", "apartment", "placement_seed", "mcs", "allows_psr"});
        RandomPlacement rp;
        rp.count = static_cast<std::size_t>(
            sd::integer(ns, "geometry.nonrta_stas", "random_count", 8));
        rp.apartment = static_cast<int>(sd::integer(ns, "geometry.nonrta_stas", "apartment", 0));
        rp.seed = static_cast<std::uint64_t>(
            sd::integer(ns, "geometry.nonrta_stas", "placement_seed", 1));
        rp.mcs = static_cast<int>(sd::integer(ns, "geometry.nonrta_stas", "mcs", 8));
        rp.allows_psr = sd::boolean(ns, "geometry.nonrta_stas", "allows_psr", true);
        if (rp.count == 0) sd::fail("geometry.nonrta_stas.random_count must be positive");
        spec.placement = rp;
      } else {
        sd::fail("geometry.nonrta_stas must be an array or a placement object");
      }
    }
  }

  if (doc.contains("radio")) {
    const auto& r = doc.at("radio");
    sd::check_keys(r, "radio",
                   {"carrier_frequency_ghz", "channel_width_mhz", "ap_tx_power_dbm",
                    "sta_tx_power_dbm", "noise_figure_db", "sinr_threshold_db",
                    "psr_safety_margin_db", "wall_loss_db", "required_sinr_db"});
    auto& link = spec.config.link;
    link.carrier_frequency_ghz = sd::num(r, "radio", "carrier_frequency_ghz", link.carrier_frequency_ghz);
    link.channel_width_mhz = sd::num(r, "radio", "channel_width_mhz", link.channel_width_mhz);
    link.ap_tx_power_dbm = sd::num(r, "radio", "ap_tx_power_dbm", link.ap_tx_power_dbm);
    link.sta_tx_power_dbm = sd::num(r, "radio", "sta_tx_power_dbm", link.sta_tx_power_dbm);
    link.noise_figure_db = sd::num(r, "radio", "noise_figure_db", link.noise_figure_db);
    link.sinr_threshold_db = sd::num(r, "radio", "sinr_threshold_db", link.sinr_threshold_db);
    link.psr_safety_margin_db = sd::num(r, "radio", "psr_safety_margin_db", link.psr_safety_margin_db);
    link.wall_loss_db = sd::num(r, "radio", "wall_loss_db", link.wall_loss_db);
    sd::mcs_map(r, "radio", "required_sinr_db", link.required_sinr_db);
    if (!(link.channel_width_mhz > 0)) sd::fail("radio.channel_width_mhz must be positive");
    if (link.psr_safety_margin_db < 0) sd::fail("radio.psr_safety_margin_db must be non-negative");
  }

  if (doc.contains("traffic")) {
    const auto& t = doc.at("traffic");
    sd::check_keys(t, "traffic",
                   {"t_rta_ms", "rta_packet_bytes", "nonrta_packet_bytes", "rta_mcs",
                    "nonrta_mcs", "data_rate_mbps"});
    auto& c = spec.config;
    c.t_rta_ms = sd::num(t, "traffic", "t_rta_ms", c.t_rta_ms);
    c.rta_packet_bytes = static_cast<int>(sd::integer(t, "traffic", "rta_packet_bytes", c.rta_packet_bytes));
    c.nonrta_packet_bytes =
        static_cast<int>(sd::integer(t, "traffic", "nonrta_packet_bytes", c.nonrta_packet_bytes));
    c.rta_mcs = static_cast<int>(sd::integer(t, "traffic", "rta_mcs", c.rta_mcs));
    c.nonrta_default_mcs =
        static_cast<int>(sd::integer(t, "traffic", "nonrta_mcs", c.nonrta_default_mcs));
    sd::mcs_map(t, "traffic", "data_rate_mbps", c.data_rate_mbps);
  }

  if (doc.contains("simulation")) {
    const auto& s = doc.at("simulation");
    sd::check_keys(s, "simulation",
                   {"txop_duration_ms", "inter_txop_gap_us", "per_ppdu_overhead_us",
                    "edca_win_probability", "delay_bound_ms", "quantile", "sim_duration_s",
                    "warmup_duration_s", "drain_limit_s", "classification_window", "seed"});
    auto& c = spec.config;
    c.txop_duration_ms = sd::num(s, "simulation", "txop_duration_ms", c.txop_duration_ms);
    c.inter_txop_gap_us = sd::num(s, "simulation", "inter_txop_gap_us", c.inter_txop_gap_us);
    c.per_ppdu_overhead_us = sd::num(s, "simulation", "per_ppdu_overhead_us", c.per_ppdu_overhead_us);
    c.edca_win_probability = sd::num(s, "simulation", "edca_win_probability", c.edca_win_probability);
    c.delay_bound_ms = sd::num(s, "simulation", "delay_bound_ms", c.delay_bound_ms);
    c.quantile = sd::num(s, "simulation", "quantile", c.quantile);
    c.sim_duration_s = sd::num(s, "simulation", "sim_duration_s", c.sim_duration_s);
    c.warmup_duration_s = sd::num(s, "simulation", "warmup_duration_s",
                                  0.1 * c.sim_duration_s);
    c.drain_limit_s = sd::num(s, "simulation", "drain_limit_s", c.drain_limit_s);
    c.classification_window = static_cast<std::size_t>(
        sd::integer(s, "simulation", "classification_window",
                    static_cast<std::int64_t>(c.classification_window)));
    spec.root_seed = static_cast<std::uint64_t>(sd::integer(s, "simulation", "seed", 1));
  } else {
    spec.config.warmup_duration_s = 0.1 * spec.config.sim_duration_s;
  }

  if (doc.contains("favorability_override")) {
    const auto& f = doc.at("favorability_override");
    if (!f.is_array() || f.empty()) sd::fail("favorability_override must be a non-empty array");
    std::vector<std::vector<std::uint8_t>> rows;
    for (const auto& row : f) {
      if (!row.is_array()) sd::fail("favorability_override rows must be arrays");
      std::vector<std::uint8_t> r;
      for (const auto& v : row) {
        if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1))
          sd::fail("favorability_override entries must be 0 or 1");
        r.push_back(static_cast<std::uint8_t>(v.get<int>()));
      }
      if (!rows.empty() && r.size() != rows.front().size())
        sd::fail("favorability_override must be rectangular");
      rows.push_back(std::move(r));
    }
    spec.config.favorability_override = FavorabilityMatrix::from_rows(rows);
  }

  return spec;
}

inline void apply_overrides(ScenarioSpec& spec, const ScenarioOverrides& o) {
  if (o.t_rta_ms) spec.config.t_rta_ms = *o.t_rta_ms;
  if (o.sinr_threshold_db) spec.config.link.sinr_threshold_db = *o.sinr_threshold_db;
  if (o.sim_duration_s) {
    const bool default_warmup =
        spec.config.warmup_duration_s == 0.1 * spec.config.sim_duration_s;
    spec.config.sim_duration_s = *o.sim_duration_s;
    if (default_warmup && !o.warmup_duration_s)
      spec.config.warmup_duration_s = 0.1 * spec.config.sim_duration_s;
  }
  if (o.warmup_duration_s) spec.config.warmup_duration_s = *o.warmup_duration_s;
  if (o.classification_window) spec.config.classification_window = *o.classification_window;
  if (o.seed) spec.root_seed = *o.seed;
}

/// Loads a scenario document, looking in $PSRSCHED_CONFIG_DIR when a relative
/// path does not resolve from the working directory.
inline ScenarioSpec load_scenario_file(const std::string& path,
                                       const ScenarioOverrides& overrides = {}) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (!fs::exists(p) && p.is_relative()) {
    if (const char* dir = std::getenv("PSRSCHED_CONFIG_DIR")) {
      const fs::path alt = fs::path(dir) / p;
      if (fs::exists(alt)) p = alt;
    }
  }
  std::ifstream in(p);
  if (!in) throw ValidationError("scenario: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("scenario: " + std::string(e.what()));
  }
  ScenarioSpec spec = parse_scenario(doc);
  apply_overrides(spec, overrides);
  return spec;
}

/// Draws station positions uniformly inside the chosen apartment, rejecting
/// spots closer than half a meter to either AP.
inline std::vector<NonRtaSta> resolve_random_placement(const FloorPlan& plan,
                                                       const RandomPlacement& rp,
                                                       const NodePosition& nonrta_ap,
                                                       const NodePosition& rta_ap) {
  if (rp.apartment < 0 ||
      static_cast<std::size_t>(rp.apartment) >= plan.apartments.size())
    throw ConfigError("placement: apartment index out of range");
  const Rect& r = plan.apartments[static_cast<std::size_t>(rp.apartment)];
  auto rng = make_rng(derive_seed(rp.seed, 0x504C4143));
  std::vector<NonRtaSta> out;
  out.reserve(rp.count);
  for (std::size_t i = 0; i < rp.count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      const double x = r.xmin + uniform_unit(rng) * r.width();
      const double y = r.ymin + uniform_unit(rng) * r.height();
      const NodePosition pos = plan.place(x, y);
      if (distance_m(pos, nonrta_ap) < 0.5 || distance_m(pos, rta_ap) < 0.5) continue;
      out.push_back(NonRtaSta{pos, rp.mcs, rp.allows_psr, "non-rta-" + std::to_string(i)});
      placed = true;
    }
    if (!placed) throw ConfigError("placement: no feasible spot found");
  }
  return out;
}

/// Concrete simulation config for placement `index`. Index 0 resolves the
/// file's own placement (or explicit station list); higher indices redraw the
/// scattering with a seed derived from the root seed.
inline ScenarioConfig placement_config(const ScenarioSpec& spec, std::size_t index = 0) {
  ScenarioConfig cfg = spec.config;
  if (index == 0) {
    if (spec.placement) {
      cfg.deployment.nonrta_stas = resolve_random_placement(
          spec.plan, *spec.placement, cfg.deployment.nonrta_ap, cfg.deployment.rta_ap);
    }
    return cfg;
  }
  RandomPlacement rp = spec.placement.value_or(RandomPlacement{
      std::max<std::size_t>(cfg.deployment.nonrta_stas.size(), 1), 0, 0,
      cfg.nonrta_default_mcs, true});
  rp.seed = derive_seed(spec.root_seed, 0x706C6163, index);
  cfg.deployment.nonrta_stas = resolve_random_placement(
      spec.plan, rp, cfg.deployment.nonrta_ap, cfg.deployment.rta_ap);
  return cfg;
}

/// Per-run simulation seed for run `index` under a root seed.
inline std::uint64_t run_seed(std::uint64_t root, std::size_t index) {
  return derive_seed(root, 0x72756E73, index);
}

/// The default two-apartment layout: the non-RTA BSS fills the left apartment
/// with its AP near the shared wall, the RTA AP sits just inside the right
/// apartment, and the RTA stations stand in the corridor between the two at
/// staggered depths so their favorability differs.
inline ScenarioSpec make_reference_scenario(std::size_t num_rta) {
  ScenarioSpec spec;
  spec.plan.apartments = {Rect{0, 0, 10, 7}, Rect{17, 0, 27, 7}};
  spec.config.deployment.nonrta_ap = spec.plan.place(9.5, 3.5);
  spec.config.deployment.rta_ap = spec.plan.place(17.5, 3.5);

  const std::vector<std::pair<double, double>> slots = {
      {15.0, 5.5}, {16.5, 2.0}, {15.4, 3.1}, {16.1, 5.9},
      {15.2, 1.2}, {16.3, 4.2}, {15.7, 6.3}, {15.9, 0.8},
  };
  if (num_rta > slots.size())
    throw ConfigError("reference scenario supports at most " +
                      std::to_string(slots.size()) + " RTA stations");
  for (std::size_t j = 0; j < num_rta; ++j) {
    spec.config.deployment.rta_stas.push_back(
        RtaSta{spec.plan.place(slots[j].first, slots[j].second), "rta-" + std::to_string(j)});
  }
  spec.placement = RandomPlacement{8, 0, 1, 8, true};
  spec.root_seed = 1;
  return spec;
}

}  // namespace psrsched
