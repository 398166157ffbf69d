// Copyright (c) 2026 psrsched contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "psrsched/sim.hpp"

namespace psrsched {

/// RFC-4180 quoting: fields containing commas, quotes, or newlines are
/// wrapped and embedded quotes doubled.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Fixed, locale-independent number formatting for CSV cells.
inline std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << '\n';
}

namespace report_detail {

inline nlohmann::json quantile_to_json(const std::optional<double>& q) {
  if (!q) return nullptr;
  if (std::isinf(*q)) return "inf";
  return *q;
}

inline std::optional<double> quantile_from_json(const nlohmann::json& v) {
  if (v.is_null()) return std::nullopt;
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw ValidationError("report: bad quantile value '" + v.get<std::string>() + "'");
  }
  return v.get<double>();
}

inline nlohmann::json opt_to_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

inline std::optional<double> opt_from_json(const nlohmann::json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace report_detail

inline nlohmann::json to_json(const SimReport& r) {
  nlohmann::json j;
  j["seed"] = r.seed;
  j["config_digest"] = r.config_digest;
  j["nonrta_bytes"] = r.nonrta_bytes;
  j["nonrta_throughput_mbps"] = r.nonrta_throughput_mbps;
  j["rta_delays"] = {{"delays_ms", r.rta_delays.delays_ms},
                     {"undelivered", r.rta_delays.undelivered}};
  j["rta_generated"] = r.rta_generated;
  j["rta_delivered"] = r.rta_delivered;
  j["events"] = {{"psr_transmissions", r.events.psr_transmissions},
                 {"gap_transmissions", r.events.gap_transmissions},
                 {"denied_opportunities", r.events.denied_opportunities}};
  if (r.tb_sequence) j["tb_sequence"] = *r.tb_sequence;
  j["derived"] = {{"delay_quantile_ms", report_detail::quantile_to_json(r.derived.delay_quantile_ms)},
                  {"loss_ratio", report_detail::opt_to_json(r.derived.loss_ratio)},
                  {"avg_throughput_mbps", r.derived.avg_throughput_mbps},
                  {"jain", report_detail::opt_to_json(r.derived.jain)}};
  return j;
}

inline SimReport simreport_from_json(const nlohmann::json& j) {
  SimReport r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config_digest = j.at("config_digest").get<std::uint64_t>();
  r.nonrta_bytes = j.at("nonrta_bytes").get<std::vector<double>>();
  r.nonrta_throughput_mbps = j.at("nonrta_throughput_mbps").get<std::vector<double>>();
  r.rta_delays.delays_ms = j.at("rta_delays").at("delays_ms").get<std::vector<double>>();
  r.rta_delays.undelivered = j.at("rta_delays").at("undelivered").get<std::size_t>();
  r.rta_generated = j.at("rta_generated").get<std::size_t>();
  r.rta_delivered = j.at("rta_delivered").get<std::size_t>();
  r.events.psr_transmissions = j.at("events").at("psr_transmissions").get<std::uint64_t>();
  r.events.gap_transmissions = j.at("events").at("gap_transmissions").get<std::uint64_t>();
  r.events.denied_opportunities =
      j.at("events").at("denied_opportunities").get<std::uint64_t>();
  if (j.contains("tb_sequence"))
    r.tb_sequence = j.at("tb_sequence").get<std::vector<std::size_t>>();
  const auto& d = j.at("derived");
  r.derived.delay_quantile_ms = report_detail::quantile_from_json(d.at("delay_quantile_ms"));
  r.derived.loss_ratio = report_detail::opt_from_json(d.at("loss_ratio"));
  r.derived.avg_throughput_mbps = d.at("avg_throughput_mbps").get<double>();
  r.derived.jain = report_detail::opt_from_json(d.at("jain"));
  return r;
}

}  // namespace psrsched
