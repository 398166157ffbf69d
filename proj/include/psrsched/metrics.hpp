// Copyright (c) 2026 psrsched contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "psrsched/errors.hpp"

namespace psrsched {

/// Pooled RTA delay measurements. Packets that never made it out keep no
/// delay value; they are carried as a count and enter the quantile as
/// infinite samples.
struct DelaySamples {
  std::vector<double> delays_ms;
  std::size_t undelivered = 0;

  std::size_t total() const { return delays_ms.size() + undelivered; }

  friend bool operator==(const DelaySamples&, const DelaySamples&) = default;
};

/// Nearest-rank empirical quantile with undelivered packets sorted above
/// every finite delay. The rank rounds outward at exact integer boundaries
/// (q*n = 999 picks the 1000th sample), so the reported value always covers
/// strictly more than a q fraction of the pool.
inline double delay_quantile(const DelaySamples& samples, double q) {
  const std::size_t n = samples.total();
  if (n == 0) throw InvalidInputError("delay_quantile: no samples");
  if (!(q > 0.0 && q < 1.0))
    throw InvalidInputError("delay_quantile: quantile must lie in (0,1)");
  auto rank = static_cast<std::size_t>(std::floor(q * static_cast<double>(n))) + 1;
  rank = std::clamp<std::size_t>(rank, 1, n);
  if (rank > samples.delays_ms.size())
    return std::numeric_limits<double>::infinity();
  std::vector<double> sorted = samples.delays_ms;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   sorted.end());
  return sorted[rank - 1];
}

/// Fraction of packets that missed the delay bound or were never delivered.
inline double loss_ratio(const DelaySamples& samples, double delay_bound_ms) {
  const std::size_t n = samples.total();
  if (n == 0) throw InvalidInputError("loss_ratio: no samples");
  std::size_t lost = samples.undelivered;
  for (double d : samples.delays_ms) {
    if (d > delay_bound_ms) ++lost;
  }
  return static_cast<double>(lost) / static_cast<double>(n);
}

/// Jain's fairness index: (sum x)^2 / (n * sum x^2). 1 means perfectly equal.
inline double jain_index(std::span<const double> throughputs) {
  if (throughputs.empty()) throw InvalidInputError("jain_index: empty input");
  double sum = 0.0;
  double sum_sq = 0.0;
  bool any_positive = false;
  for (double x : throughputs) {
    if (x < 0.0) throw InvalidInputError("jain_index: negative throughput");
    any_positive = any_positive || x > 0.0;
    sum += x;
    sum_sq += x * x;
  }
  if (!any_positive) throw InvalidInputError("jain_index: all-zero throughputs");
  return (sum * sum) / (static_cast<double>(throughputs.size()) * sum_sq);
}

inline double jain_index(const std::vector<double>& throughputs) {
  return jain_index(std::span<const double>(throughputs));
}

}  // namespace psrsched
