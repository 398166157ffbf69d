// Copyright (c) 2026 psrsched contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psrsched/link_budget.hpp"
#include "psrsched/metrics.hpp"
#include "psrsched/random.hpp"
#include "psrsched/schedule.hpp"

namespace psrsched {

/// Everything one comparative experiment needs: node layout, radio model,
/// traffic shape, and MAC timing. The favorability override, when present,
/// replaces the geometric classification entirely (pure scheduling studies).
struct ScenarioConfig {
  Deployment deployment;
  LinkBudgetConfig link;
  std::optional<FavorabilityMatrix> favorability_override;

  double t_rta_ms = 20.0;
  int rta_packet_bytes = 256;
  int nonrta_packet_bytes = 1000;
  int rta_mcs = 0;
  /// MCS assumed for non-RTA stations that carry no explicit assignment
  /// (override-only scenarios and randomized placements).
  int nonrta_default_mcs = 8;
  std::map<int, double> data_rate_mbps = {{0, 8.6}, {8, 103.2}};

  double txop_duration_ms = 5.0;
  double inter_txop_gap_us = 100.0;
  double per_ppdu_overhead_us = 100.0;
  double edca_win_probability = 0.25;

  double delay_bound_ms = 20.0;
  double quantile = 0.999;
  double sim_duration_s = 30.0;
  double warmup_duration_s = 3.0;
  /// How long the event loop keeps cycling after traffic generation stops so
  /// that in-queue packets resolve to delivered or lost.
  double drain_limit_s = 5.0;

  std::size_t classification_window = 8;
  bool record_tb_sequence = false;

  std::size_t num_nonrta() const {
    return favorability_override && deployment.nonrta_stas.empty()
               ? favorability_override->num_columns()
               : deployment.nonrta_stas.size();
  }
  std::size_t num_rta() const {
    return favorability_override && deployment.rta_stas.empty()
               ? favorability_override->num_rows()
               : deployment.rta_stas.size();
  }

  double data_rate_for_mcs(int mcs) const {
    auto it = data_rate_mbps.find(mcs);
    if (it == data_rate_mbps.end())
      throw ConfigError("data_rate_mbps: no entry for MCS " + std::to_string(mcs));
    return it->second;
  }

  /// Airtime of one RTA packet in microseconds, preamble and such folded into
  /// the per-PPDU overhead.
  double rta_airtime_us() const {
    return static_cast<double>(rta_packet_bytes) * 8.0 / data_rate_for_mcs(rta_mcs) +
           per_ppdu_overhead_us;
  }
};

inline void validate_scenario(const ScenarioConfig& cfg) {
  if (cfg.num_nonrta() == 0)
    throw InvalidInputError("scenario: at least one non-RTA station required");
  if (!(cfg.t_rta_ms > 0)) throw InvalidInputError("scenario: t_rta_ms must be positive");
  if (!(cfg.txop_duration_ms > 0))
    throw InvalidInputError("scenario: txop_duration_ms must be positive");
  if (!(cfg.inter_txop_gap_us >= 0))
    throw InvalidInputError("scenario: inter_txop_gap_us must be non-negative");
  if (!(cfg.edca_win_probability >= 0.0 && cfg.edca_win_probability <= 1.0))
    throw InvalidInputError("scenario: edca_win_probability must lie in [0,1]");
  if (!(cfg.quantile > 0.0 && cfg.quantile < 1.0))
    throw InvalidInputError("scenario: quantile must lie in (0,1)");
  if (!(cfg.sim_duration_s > 0))
    throw InvalidInputError("scenario: sim_duration_s must be positive");
  if (!(cfg.warmup_duration_s >= 0 && cfg.warmup_duration_s < cfg.sim_duration_s))
    throw InvalidInputError("scenario: warmup must be shorter than the run");
  if (cfg.rta_packet_bytes <= 0 || cfg.nonrta_packet_bytes <= 0)
    throw InvalidInputError("scenario: packet sizes must be positive");
  if (cfg.classification_window == 0)
    throw InvalidInputError("scenario: classification_window must be at least 1");
  if (cfg.favorability_override) {
    const auto& f = *cfg.favorability_override;
    if (!cfg.deployment.nonrta_stas.empty() &&
        f.num_columns() != cfg.deployment.nonrta_stas.size())
      throw InvalidInputError("scenario: favorability override column count mismatch");
    if (!cfg.deployment.rta_stas.empty() &&
        f.num_rows() != cfg.deployment.rta_stas.size())
      throw InvalidInputError("scenario: favorability override row count mismatch");
  } else {
    if (cfg.deployment.nonrta_stas.empty())
      throw InvalidInputError("scenario: geometry or favorability override required");
  }
}

/// Transmission-order policy for the non-RTA BSS.
struct SchedulePolicy {
  enum class Kind { AirtimeFair, FixedOrder };
  Kind kind = Kind::AirtimeFair;
  std::vector<std::size_t> order;  // FixedOrder: repeated cyclically

  static SchedulePolicy airtime_fair() { return SchedulePolicy{}; }
  static SchedulePolicy fixed_order(std::vector<std::size_t> o) {
    return SchedulePolicy{Kind::FixedOrder, std::move(o)};
  }

  std::string_view tag() const {
    return kind == Kind::AirtimeFair ? "airtime-fair" : "fixed-order";
  }
};

/// One cycle of the airtime-fairness baseline: a fresh uniform permutation,
/// equal expected channel time per station.
inline std::vector<std::size_t> airtime_fair_order(std::size_t n, std::mt19937_64& rng) {
  if (n == 0) throw InvalidInputError("airtime_fair_order: n must be positive");
  return random_permutation(n, rng);
}

struct SimEvents {
  std::uint64_t psr_transmissions = 0;
  std::uint64_t gap_transmissions = 0;
  /// Uplink phases in which an RTA station held a packet but did not get to
  /// transmit (unfavorable pairing, airtime misfit, or lost the draw).
  std::uint64_t denied_opportunities = 0;

  friend bool operator==(const SimEvents&, const SimEvents&) = default;
};

struct SimDerived {
  /// Absent when the run produced no RTA samples; +inf when the configured
  /// rank lands on an undelivered packet.
  std::optional<double> delay_quantile_ms;
  std::optional<double> loss_ratio;
  double avg_throughput_mbps = 0.0;
  std::optional<double> jain;

  friend bool operator==(const SimDerived&, const SimDerived&) = default;
};

struct SimReport {
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;
  std::vector<double> nonrta_bytes;
  std::vector<double> nonrta_throughput_mbps;
  DelaySamples rta_delays;
  std::size_t rta_generated = 0;
  std::size_t rta_delivered = 0;
  SimEvents events;
  std::optional<std::vector<std::size_t>> tb_sequence;
  SimDerived derived;

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

namespace detail {

inline void digest_bytes(std::uint64_t& h, const void* p, std::size_t n) {
  h = fnv1a(p, n, h);
}

inline void digest_double(std::uint64_t& h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  digest_bytes(h, &bits, sizeof(bits));
}

inline void digest_node(std::uint64_t& h, const NodePosition& p) {
  digest_double(h, p.x);
  digest_double(h, p.y);
  digest_bytes(h, &p.apartment, sizeof(p.apartment));
}

}  // namespace detail

/// Stable fingerprint of a scenario; lets a report be matched back to the
/// exact configuration that produced it.
inline std::uint64_t config_digest(const ScenarioConfig& cfg) {
  using detail::digest_bytes;
  using detail::digest_double;
  std::uint64_t h = 0xCBF29CE484222325ull;
  detail::digest_node(h, cfg.deployment.nonrta_ap);
  detail::digest_node(h, cfg.deployment.rta_ap);
  for (const auto& s : cfg.deployment.nonrta_stas) {
    detail::digest_node(h, s.pos);
    digest_bytes(h, &s.mcs, sizeof(s.mcs));
    const std::uint8_t a = s.allows_psr;
    digest_bytes(h, &a, 1);
    h = fnv1a(s.id, h);
  }
  for (const auto& s : cfg.deployment.rta_stas) {
    detail::digest_node(h, s.pos);
    h = fnv1a(s.id, h);
  }
  digest_double(h, cfg.link.carrier_frequency_ghz);
  digest_double(h, cfg.link.channel_width_mhz);
  digest_double(h, cfg.link.ap_tx_power_dbm);
  digest_double(h, cfg.link.sta_tx_power_dbm);
  digest_double(h, cfg.link.noise_figure_db);
  digest_double(h, cfg.link.sinr_threshold_db);
  digest_double(h, cfg.link.psr_safety_margin_db);
  digest_double(h, cfg.link.wall_loss_db);
  for (const auto& [mcs, sinr] : cfg.link.required_sinr_db) {
    digest_bytes(h, &mcs, sizeof(mcs));
    digest_double(h, sinr);
  }
  if (cfg.favorability_override) {
    for (const auto& col : cfg.favorability_override->columns()) {
      digest_bytes(h, col.entries.data(), col.entries.size());
      h = fnv1a(col.sta_id, h);
    }
  }
  digest_double(h, cfg.t_rta_ms);
  digest_bytes(h, &cfg.rta_packet_bytes, sizeof(cfg.rta_packet_bytes));
  digest_bytes(h, &cfg.nonrta_packet_bytes, sizeof(cfg.nonrta_packet_bytes));
  digest_bytes(h, &cfg.rta_mcs, sizeof(cfg.rta_mcs));
  digest_bytes(h, &cfg.nonrta_default_mcs, sizeof(cfg.nonrta_default_mcs));
  for (const auto& [mcs, rate] : cfg.data_rate_mbps) {
    digest_bytes(h, &mcs, sizeof(mcs));
    digest_double(h, rate);
  }
  digest_double(h, cfg.txop_duration_ms);
  digest_double(h, cfg.inter_txop_gap_us);
  digest_double(h, cfg.per_ppdu_overhead_us);
  digest_double(h, cfg.edca_win_probability);
  digest_double(h, cfg.delay_bound_ms);
  digest_double(h, cfg.quantile);
  digest_double(h, cfg.sim_duration_s);
  digest_double(h, cfg.warmup_duration_s);
  digest_double(h, cfg.drain_limit_s);
  digest_bytes(h, &cfg.classification_window, sizeof(cfg.classification_window));
  return h;
}

/// Seeded discrete-event run of the two overlapping BSSs.
///
/// Each schedule cycle walks the policy's order once. Every TXOP is preceded
/// by a contention gap that a queued RTA station may seize; the TXOP itself
/// spends its first half on downlink (no reuse opportunity) and its second
/// half on the scheduled station's triggered uplink, during which exactly one
/// eligible RTA station may transmit at reduced power. Generation stops at
/// sim_duration; the loop then drains outstanding queues so every counted
/// packet ends up delivered or lost.
inline SimReport run_simulation(const ScenarioConfig& cfg, const SchedulePolicy& policy,
                                std::uint64_t seed) {
  validate_scenario(cfg);
  const std::size_t n = cfg.num_nonrta();
  const std::size_t m = cfg.num_rta();

  if (policy.kind == SchedulePolicy::Kind::FixedOrder) {
    if (policy.order.size() != n)
      throw InvalidInputError("run_simulation: policy order length differs from N");
    std::vector<std::uint8_t> seen(n, 0);
    for (auto i : policy.order) {
      if (i >= n || seen[i])
        throw InvalidInputError("run_simulation: policy order is not a permutation");
      seen[i] = 1;
    }
  }

  const FavorabilityMatrix round =
      cfg.favorability_override ? *cfg.favorability_override
                                : classify_favorability(cfg.deployment, cfg.link);
  if (round.num_columns() != n || round.num_rows() != m)
    throw InvalidInputError("run_simulation: favorability dimensions mismatch");

  auto mac_rng = make_rng(derive_seed(seed, 0x6D6163));      // contention draws
  auto policy_rng = make_rng(derive_seed(seed, 0x706F6C));   // baseline shuffles
  auto traffic_rng = make_rng(derive_seed(seed, 0x747266));  // arrival phases

  const double t_rta_us = cfg.t_rta_ms * 1000.0;
  const double txop_us = cfg.txop_duration_ms * 1000.0;
  const double half_us = txop_us / 2.0;
  const double gap_us = cfg.inter_txop_gap_us;
  const double air_us = cfg.rta_airtime_us();
  const double warmup_us = cfg.warmup_duration_s * 1e6;
  const double gen_end_us = cfg.sim_duration_s * 1e6;
  const double drain_end_us = gen_end_us + cfg.drain_limit_s * 1e6;

  // Bytes one station moves per TXOP half: one aggregated PPDU, whole packets.
  std::vector<double> bytes_per_half(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const int mcs = cfg.deployment.nonrta_stas.empty() ? cfg.nonrta_default_mcs
                                                       : cfg.deployment.nonrta_stas[s].mcs;
    const double usable_us = std::max(0.0, half_us - cfg.per_ppdu_overhead_us);
    const double bits = usable_us * cfg.data_rate_for_mcs(mcs);
    const double pkts = std::floor(bits / (8.0 * cfg.nonrta_packet_bytes));
    bytes_per_half[s] = pkts * cfg.nonrta_packet_bytes;
  }

  struct RtaQueue {
    std::deque<double> q;  // enqueue timestamps, oldest first
    double next_enqueue = 0.0;
  };
  std::vector<RtaQueue> queues(m);
  for (std::size_t j = 0; j < m; ++j)
    queues[j].next_enqueue = uniform_unit(traffic_rng) * t_rta_us;

  SimReport report;
  report.seed = seed;
  report.config_digest = config_digest(cfg);
  report.nonrta_bytes.assign(n, 0.0);
  if (cfg.record_tb_sequence) report.tb_sequence.emplace();

  auto materialize = [&](double now) {
    for (auto& st : queues) {
      while (st.next_enqueue <= now && st.next_enqueue < gen_end_us) {
        st.q.push_back(st.next_enqueue);
        if (st.next_enqueue >= warmup_us) ++report.rta_generated;
        st.next_enqueue += t_rta_us;
      }
    }
  };

  auto deliver = [&](double enqueue_us, double delivery_us) {
    if (enqueue_us >= warmup_us) {
      report.rta_delays.delays_ms.push_back((delivery_us - enqueue_us) / 1000.0);
      ++report.rta_delivered;
    }
  };

  MeasurementGrid grid(n, m, cfg.classification_window);

  double t = 0.0;
  std::vector<std::size_t> scratch;
  auto pending_traffic = [&] {
    for (const auto& st : queues) {
      if (!st.q.empty() || st.next_enqueue < gen_end_us) return true;
    }
    return false;
  };

  while (t < gen_end_us || (t < drain_end_us && pending_traffic())) {
    const std::vector<std::size_t> order = policy.kind == SchedulePolicy::Kind::FixedOrder
                                               ? policy.order
                                               : airtime_fair_order(n, policy_rng);
    grid.record_round(round);
    const FavorabilityMatrix windowed = grid.windowed();

    for (const std::size_t s : order) {
      // Contention gap: queued RTA stations race for the idle slot; one
      // winner sends a packet at full power and the TXOP start shifts back.
      materialize(t);
      scratch.clear();
      for (std::size_t j = 0; j < m; ++j) {
        if (!queues[j].q.empty() && bernoulli(mac_rng, cfg.edca_win_probability))
          scratch.push_back(j);
      }
      if (!scratch.empty()) {
        const std::size_t w = scratch[uniform_index(mac_rng, scratch.size())];
        const double enq = queues[w].q.front();
        queues[w].q.pop_front();
        deliver(enq, t + gap_us + air_us);
        ++report.events.gap_transmissions;
        t += gap_us + air_us;
      } else {
        t += gap_us;
      }

      const double txop_start = t;
      const double uplink_start = txop_start + half_us;
      if (txop_start >= warmup_us && txop_start < gen_end_us)
        report.nonrta_bytes[s] += 2.0 * bytes_per_half[s];
      if (report.tb_sequence) report.tb_sequence->push_back(s);

      // Triggered uplink half: one eligible RTA station reuses the slot.
      materialize(uplink_start);
      std::size_t queued = 0;
      scratch.clear();
      for (std::size_t j = 0; j < m; ++j) {
        if (queues[j].q.empty()) continue;
        ++queued;
        if (windowed.at(j, s) != 0 && air_us <= half_us) scratch.push_back(j);
      }
      bool transmitted = false;
      if (!scratch.empty()) {
        const std::size_t w = scratch[uniform_index(mac_rng, scratch.size())];
        const double enq = queues[w].q.front();
        queues[w].q.pop_front();
        deliver(enq, uplink_start + air_us);
        ++report.events.psr_transmissions;
        transmitted = true;
      }
      report.events.denied_opportunities += queued - (transmitted ? 1 : 0);

      t = txop_start + txop_us;
    }
  }

  // Whatever crosses the drain limit is lost; flush remaining generation so
  // the loss shows up in the counts.
  materialize(gen_end_us);
  for (const auto& st : queues) {
    for (double enq : st.q) {
      if (enq >= warmup_us) ++report.rta_delays.undelivered;
    }
  }

  const double span_us = gen_end_us - warmup_us;
  report.nonrta_throughput_mbps.resize(n);
  for (std::size_t s = 0; s < n; ++s)
    report.nonrta_throughput_mbps[s] = report.nonrta_bytes[s] * 8.0 / span_us;

  if (report.rta_delays.total() > 0) {
    report.derived.delay_quantile_ms = delay_quantile(report.rta_delays, cfg.quantile);
    report.derived.loss_ratio = loss_ratio(report.rta_delays, cfg.delay_bound_ms);
  }
  report.derived.avg_throughput_mbps =
      std::accumulate(report.nonrta_throughput_mbps.begin(),
                      report.nonrta_throughput_mbps.end(), 0.0) /
      static_cast<double>(n);
  bool any_positive = false;
  for (double x : report.nonrta_throughput_mbps) any_positive = any_positive || x > 0.0;
  if (any_positive) report.derived.jain = jain_index(report.nonrta_throughput_mbps);
  return report;
}

}  // namespace psrsched
