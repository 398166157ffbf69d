// Copyright (c) 2026 psrsched contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "psrsched/errors.hpp"
#include "psrsched/schedule.hpp"

namespace psrsched {

struct NodePosition {
  double x = 0.0;
  double y = 0.0;
  /// Index of the containing apartment in the floor plan, -1 for open area.
  int apartment = -1;

  /// Wall penetrations on the straight path to `other`: one per apartment
  /// boundary crossed. Same apartment (or both outside) means none.
  int walls_to(const NodePosition& other) const {
    if (apartment == other.apartment) return 0;
    return (apartment >= 0 ? 1 : 0) + (other.apartment >= 0 ? 1 : 0);
  }
};

inline double distance_m(const NodePosition& a, const NodePosition& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct Rect {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

/// Apartment rectangles; node positions derive their apartment index from it.
struct FloorPlan {
  std::vector<Rect> apartments;

  int locate(double x, double y) const {
    for (std::size_t i = 0; i < apartments.size(); ++i) {
      if (apartments[i].contains(x, y)) return static_cast<int>(i);
    }
    return -1;
  }

  NodePosition place(double x, double y) const {
    if (!std::isfinite(x) || !std::isfinite(y))
      throw InvalidInputError("FloorPlan::place: coordinates must be finite");
    return NodePosition{x, y, locate(x, y)};
  }
};

struct LinkBudgetConfig {
  double carrier_frequency_ghz = 5.0;
  double channel_width_mhz = 20.0;
  double ap_tx_power_dbm = 20.0;
  double sta_tx_power_dbm = 15.0;
  double noise_figure_db = 7.0;
  double sinr_threshold_db = 3.0;
  double psr_safety_margin_db = 1.0;
  double wall_loss_db = 5.0;
  /// Minimum SINR needed to decode each MCS; consulted when computing how
  /// much interference a triggered uplink can absorb.
  std::map<int, double> required_sinr_db = {{0, 3.0}, {8, 29.0}};

  double required_sinr_for_mcs(int mcs) const {
    auto it = required_sinr_db.find(mcs);
    if (it == required_sinr_db.end())
      throw ConfigError("required_sinr_db: no entry for MCS " + std::to_string(mcs));
    return it->second;
  }
};

struct NonRtaSta {
  NodePosition pos;
  int mcs = 8;
  bool allows_psr = true;
  std::string id;
};

struct RtaSta {
  NodePosition pos;
  std::string id;
};

/// Node layout of the two overlapping BSSs.
struct Deployment {
  NodePosition nonrta_ap;
  NodePosition rta_ap;
  std::vector<NonRtaSta> nonrta_stas;
  std::vector<RtaSta> rta_stas;
};

/// Residential indoor pathloss with a 5 m breakpoint plus per-wall penetration:
/// PL = 40.05 + 20 log10(f/2.4) + 20 log10(min(d,5)) + [d>5] 35 log10(d/5) + W * wall_loss.
inline double pathloss_db(const NodePosition& a, const NodePosition& b,
                          const LinkBudgetConfig& cfg) {
  const double d = distance_m(a, b);
  if (d <= 0.0) throw InvalidInputError("pathloss_db: zero distance");
  double pl = 40.05 + 20.0 * std::log10(cfg.carrier_frequency_ghz / 2.4) +
              20.0 * std::log10(std::min(d, 5.0));
  if (d > 5.0) pl += 35.0 * std::log10(d / 5.0);
  pl += cfg.wall_loss_db * a.walls_to(b);
  return pl;
}

inline double noise_floor_dbm(const LinkBudgetConfig& cfg) {
  return -174.0 + 10.0 * std::log10(cfg.channel_width_mhz * 1e6) + cfg.noise_figure_db;
}

/// Transmit power available to a spatial-reuse transmission: the trigger
/// frame advertises the AP power and acceptable interference, the candidate
/// subtracts its measured trigger RSSI and the safety margin, and its own
/// power cap binds from above.
inline double psr_max_tx_power(double tf_rssi_dbm, double ap_tx_dbm,
                               double accept_interference_dbm,
                               const LinkBudgetConfig& cfg) {
  const double restricted =
      ap_tx_dbm + accept_interference_dbm - tf_rssi_dbm - cfg.psr_safety_margin_db;
  return std::min(cfg.sta_tx_power_dbm, restricted);
}

/// Acceptable interference from a received-power figure: what the triggered
/// uplink can absorb while still decoding at its MCS, margin included.
inline double accept_interference_from_rx(double rx_dbm, int mcs,
                                          const LinkBudgetConfig& cfg) {
  return rx_dbm - cfg.required_sinr_for_mcs(mcs) - cfg.psr_safety_margin_db;
}

/// Acceptable interference at the non-RTA AP during `sta`'s triggered uplink.
inline double accept_interference_dbm(const NonRtaSta& sta,
                                      const NodePosition& nonrta_ap,
                                      const LinkBudgetConfig& cfg) {
  const double rx = cfg.sta_tx_power_dbm - pathloss_db(sta.pos, nonrta_ap, cfg);
  return accept_interference_from_rx(rx, sta.mcs, cfg);
}

/// Power-domain SINR from dB-domain terms.
inline double sinr_from_terms_db(double signal_dbm, double interference_dbm,
                                 double noise_dbm) {
  const double denom =
      std::pow(10.0, interference_dbm / 10.0) + std::pow(10.0, noise_dbm / 10.0);
  return signal_dbm - 10.0 * std::log10(denom);
}

/// Full budget of one candidate PSR pairing: RTA station `rta_index`
/// transmitting to its AP while non-RTA station `nonrta_index` holds the
/// triggered uplink.
struct PsrLinkBudget {
  double accept_interference_dbm = 0;
  double tf_rssi_dbm = 0;
  double tx_power_dbm = 0;
  double signal_dbm = 0;
  double interference_dbm = 0;
  double noise_dbm = 0;
  double sinr_db = 0;
};

inline PsrLinkBudget psr_link_budget(const Deployment& dep, std::size_t rta_index,
                                     std::size_t nonrta_index,
                                     const LinkBudgetConfig& cfg) {
  if (rta_index >= dep.rta_stas.size() || nonrta_index >= dep.nonrta_stas.size())
    throw InvalidInputError("psr_link_budget: station index out of range");
  const auto& rta = dep.rta_stas[rta_index];
  const auto& nonrta = dep.nonrta_stas[nonrta_index];

  PsrLinkBudget b;
  b.accept_interference_dbm = accept_interference_dbm(nonrta, dep.nonrta_ap, cfg);
  b.tf_rssi_dbm = cfg.ap_tx_power_dbm - pathloss_db(dep.nonrta_ap, rta.pos, cfg);
  b.tx_power_dbm = psr_max_tx_power(b.tf_rssi_dbm, cfg.ap_tx_power_dbm,
                                    b.accept_interference_dbm, cfg);
  b.signal_dbm = b.tx_power_dbm - pathloss_db(rta.pos, dep.rta_ap, cfg);
  b.interference_dbm = cfg.sta_tx_power_dbm - pathloss_db(nonrta.pos, dep.rta_ap, cfg);
  b.noise_dbm = noise_floor_dbm(cfg);
  b.sinr_db = sinr_from_terms_db(b.signal_dbm, b.interference_dbm, b.noise_dbm);
  return b;
}

inline double expected_psr_sinr(const Deployment& dep, std::size_t rta_index,
                                std::size_t nonrta_index, const LinkBudgetConfig& cfg) {
  return psr_link_budget(dep, rta_index, nonrta_index, cfg).sinr_db;
}

/// Expected SINR for every (RTA station, non-RTA station) pairing;
/// table[j][i] covers RTA station j during non-RTA station i's uplink.
inline std::vector<std::vector<double>> sinr_table(const Deployment& dep,
                                                   const LinkBudgetConfig& cfg) {
  std::vector<std::vector<double>> t(dep.rta_stas.size(),
                                     std::vector<double>(dep.nonrta_stas.size()));
  for (std::size_t j = 0; j < dep.rta_stas.size(); ++j) {
    for (std::size_t i = 0; i < dep.nonrta_stas.size(); ++i) {
      t[j][i] = expected_psr_sinr(dep, j, i, cfg);
    }
  }
  return t;
}

/// One classification round: station i is favorable for RTA station j when it
/// permits spatial reuse at all and the expected SINR clears the threshold
/// strictly.
inline FavorabilityMatrix classify_favorability(const Deployment& dep,
                                                const LinkBudgetConfig& cfg) {
  std::vector<FavorabilityVector> cols;
  cols.reserve(dep.nonrta_stas.size());
  for (std::size_t i = 0; i < dep.nonrta_stas.size(); ++i) {
    std::vector<std::uint8_t> entries(dep.rta_stas.size(), 0);
    if (dep.nonrta_stas[i].allows_psr) {
      for (std::size_t j = 0; j < dep.rta_stas.size(); ++j) {
        entries[j] =
            expected_psr_sinr(dep, j, i, cfg) > cfg.sinr_threshold_db ? 1 : 0;
      }
    }
    cols.emplace_back(std::move(entries), dep.nonrta_stas[i].id);
  }
  return FavorabilityMatrix(std::move(cols));
}

/// Ring of the most recent pass/fail classification outcomes for one
/// (non-RTA station, RTA station) pair.
class MeasurementWindow {
 public:
  explicit MeasurementWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0)
      throw InvalidInputError("MeasurementWindow: capacity must be at least 1");
  }

  void record(bool pass) {
    ring_.push_back(pass ? 1 : 0);
    fails_ += pass ? 0 : 1;
    if (ring_.size() > capacity_) {
      fails_ -= ring_.front() ? 0 : 1;
      ring_.pop_front();
    }
  }

  std::size_t size() const { return ring_.size(); }
  bool empty() const { return ring_.empty(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t fail_count() const { return fails_; }

 private:
  std::size_t capacity_;
  std::deque<std::uint8_t> ring_;
  std::size_t fails_ = 0;
};

/// A pair stays favorable only while every retained measurement passed.
inline bool windowed_favorable(const MeasurementWindow& window) {
  if (window.empty())
    throw InvalidStateError("windowed_favorable: no measurements recorded");
  return window.fail_count() == 0;
}

/// Grid of measurement windows covering every station pairing.
class MeasurementGrid {
 public:
  MeasurementGrid(std::size_t num_nonrta, std::size_t num_rta, std::size_t capacity)
      : n_(num_nonrta), m_(num_rta) {
    windows_.reserve(n_ * m_);
    for (std::size_t k = 0; k < n_ * m_; ++k) windows_.emplace_back(capacity);
  }

  void record_round(const FavorabilityMatrix& round) {
    if (round.num_columns() != n_ || round.num_rows() != m_)
      throw InvalidInputError("MeasurementGrid: round dimensions mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) {
        windows_[i * m_ + j].record(round.at(j, i) != 0);
      }
    }
    last_ids_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) last_ids_[i] = round.columns()[i].sta_id;
  }

  const MeasurementWindow& window(std::size_t nonrta_index, std::size_t rta_index) const {
    return windows_.at(nonrta_index * m_ + rta_index);
  }

  /// AND-combined matrix over the retained rounds.
  FavorabilityMatrix windowed() const {
    std::vector<FavorabilityVector> cols;
    cols.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      std::vector<std::uint8_t> e(m_);
      for (std::size_t j = 0; j < m_; ++j) {
        e[j] = windowed_favorable(windows_[i * m_ + j]) ? 1 : 0;
      }
      cols.emplace_back(std::move(e), last_ids_.empty() ? std::string{} : last_ids_[i]);
    }
    return FavorabilityMatrix(std::move(cols));
  }

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<MeasurementWindow> windows_;
  std::vector<std::string> last_ids_;
};

}  // namespace psrsched
