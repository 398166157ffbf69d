// Copyright (c) 2026 psrsched contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "psrsched/random.hpp"
#include "psrsched/schedule.hpp"

namespace psrsched {

struct SolverOptions {
  /// Enumerating (N-1)! arrangements past this point stops being a desk-scale
  /// exercise; callers can raise it knowingly.
  std::size_t brute_force_max_n = 12;
};

/// A transmission order together with the objective it achieves over all rows
/// of the full favorability matrix.
struct ScheduleSolution {
  std::vector<std::size_t> order;  // permutation of column indices
  ObjectiveVector objective;
  std::string solver_tag;
  std::chrono::nanoseconds elapsed{0};
};

namespace detail {

inline void validate_instance(const std::vector<FavorabilityVector>& vectors) {
  if (vectors.empty())
    throw InvalidInputError("schedule solver: need at least one vector");
  for (const auto& v : vectors) {
    if (v.size() != vectors.front().size())
      throw InvalidInputError("schedule solver: vectors must have equal length");
  }
}

inline std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

/// Zero-run values for the matrix whose columns are taken in `order`,
/// without materializing the reordered matrix.
inline void zero_runs_of_order(const FavorabilityMatrix& f,
                               const std::vector<std::size_t>& order,
                               std::vector<int>& out) {
  const std::size_t m = f.num_rows();
  const std::size_t n = order.size();
  out.assign(m, 0);
  for (std::size_t r = 0; r < m; ++r) {
    bool has_one = false;
    for (std::size_t c = 0; c < n && !has_one; ++c) has_one = f.at(r, order[c]) != 0;
    if (!has_one) {
      out[r] = static_cast<int>(n);
      continue;
    }
    int best = 0, run = 0;
    for (std::size_t k = 0; k < 2 * n; ++k) {
      if (f.at(r, order[k % n]) == 0) {
        ++run;
        if (run > best) best = run;
      } else {
        run = 0;
      }
    }
    out[r] = best;
  }
}

inline bool lex_less_desc_sorted(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end(), std::greater<int>());
  std::sort(b.begin(), b.end(), std::greater<int>());
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      std::less<int>());
}

/// Final solution assembly: objective is recomputed over the full matrix so
/// trivial rows reappear with their fixed values.
inline ScheduleSolution finish(const FavorabilityMatrix& full,
                               std::vector<std::size_t> order, std::string tag,
                               std::chrono::steady_clock::time_point t0) {
  ScheduleSolution sol;
  sol.objective = objective_vector(full.reordered(order));
  sol.order = std::move(order);
  sol.solver_tag = std::move(tag);
  sol.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - t0);
  return sol;
}

/// Per-row cyclic gap bookkeeping used by the greedy insertion scan. For the
/// current partial order it answers, in O(1), what the row's worst zero run
/// becomes when one more column is inserted at a given boundary slot.
struct RowGaps {
  bool all_zero = false;
  bool all_one = false;
  int length = 0;
  std::vector<int> zeros_left;   // indexed by slot p in 0..L-1 (slot 0 == wrap)
  std::vector<int> zeros_right;  // zeros at/after position p, cyclically
  int max1 = 0;                  // largest gap
  int max1_count = 0;
  int max2 = 0;                  // second largest gap (0 when absent)

  void build(const FavorabilityMatrix& f, std::size_t row,
             const std::vector<std::size_t>& order) {
    const int L = static_cast<int>(order.size());
    length = L;
    std::vector<std::uint8_t> seq(L);
    int ones = 0;
    for (int k = 0; k < L; ++k) {
      seq[k] = f.at(row, order[k]);
      ones += seq[k] != 0;
    }
    all_zero = ones == 0;
    all_one = ones == L;
    if (all_zero || all_one) return;

    zeros_left.assign(L, 0);
    zeros_right.assign(L, 0);
    // First position holding a 1, to anchor the cyclic sweeps.
    int first_one = 0;
    while (seq[first_one] == 0) ++first_one;
    for (int i = 1; i <= L; ++i) {
      const int k = (first_one + i) % L;
      const int prev = (first_one + i - 1) % L;
      zeros_left[k] = seq[prev] == 0 ? zeros_left[prev] + 1 : 0;
      // zeros_left[k] counts the zero run ending just before position k.
    }
    for (int i = L - 1; i >= 0; --i) {
      const int k = (first_one + i) % L;
      const int next = (k + 1) % L;
      zeros_right[k] = seq[k] == 0 ? zeros_right[next] + 1 : 0;
    }

    max1 = 0;
    max1_count = 0;
    max2 = 0;
    int prev_one = -1;
    int last_one = -1;
    int first = -1;
    for (int k = 0; k < L; ++k) {
      if (seq[k] == 0) continue;
      if (first < 0) first = k;
      if (prev_one >= 0) note_gap(k - prev_one - 1);
      prev_one = k;
      last_one = k;
    }
    note_gap(L - 1 - last_one + first);  // wrap-around gap
  }

  /// Worst zero run after inserting `bit` at boundary slot p (between
  /// positions p-1 and p of the current order; p == L means the wrap slot,
  /// identical to p == 0).
  int zero_run_after_insert(int p, bool bit) const {
    if (all_zero) return bit ? length : length + 1;
    if (all_one) return bit ? 0 : 1;
    const int slot = p % length;
    const int a = zeros_left[slot];
    const int b = zeros_right[slot];
    const int g = a + b;
    if (!bit) return std::max(max1, g + 1);
    const int others = g < max1 ? max1 : (max1_count > 1 ? max1 : max2);
    return std::max({others, a, b});
  }

 private:
  void note_gap(int g) {
    if (g > max1) {
      max2 = max1;
      max1 = g;
      max1_count = 1;
    } else if (g == max1) {
      ++max1_count;
    } else if (g > max2) {
      max2 = g;
    }
  }
};

}  // namespace detail

/// Exact lexicographic minimization over all column permutations. The
/// objective is rotation invariant, so the first column is pinned and only
/// (N-1)! arrangements are enumerated; ties keep the earliest arrangement in
/// enumeration order.
inline ScheduleSolution brute_force_schedule(
    const std::vector<FavorabilityVector>& vectors, const SolverOptions& opts = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  detail::validate_instance(vectors);
  const std::size_t n = vectors.size();
  if (n > opts.brute_force_max_n)
    throw CapacityError("brute_force_schedule: N=" + std::to_string(n) +
                        " exceeds the cap of " +
                        std::to_string(opts.brute_force_max_n) +
                        " (factorial enumeration)");

  const FavorabilityMatrix full(vectors);
  const TrivialRowSplit split = strip_trivial_rows(full);
  std::vector<std::size_t> best = detail::identity_order(n);

  if (split.reduced.num_rows() > 0 && n > 2) {
    std::vector<std::size_t> tail(n - 1);
    std::iota(tail.begin(), tail.end(), std::size_t{1});
    std::vector<std::size_t> candidate = best;
    std::vector<int> zs;
    std::vector<int> best_zs;
    detail::zero_runs_of_order(split.reduced, best, best_zs);
    std::sort(best_zs.begin(), best_zs.end(), std::greater<int>());
    while (std::next_permutation(tail.begin(), tail.end())) {
      candidate[0] = 0;
      std::copy(tail.begin(), tail.end(), candidate.begin() + 1);
      detail::zero_runs_of_order(split.reduced, candidate, zs);
      std::sort(zs.begin(), zs.end(), std::greater<int>());
      if (std::lexicographical_compare(zs.begin(), zs.end(), best_zs.begin(),
                                       best_zs.end())) {
        best = candidate;
        best_zs = zs;
      }
    }
  }
  return detail::finish(full, std::move(best), "brute_force", t0);
}

/// Greedy insertion: start from the first two vectors, then place each
/// remaining vector at the boundary slot that minimizes the objective of the
/// partial matrix, keeping the earliest slot on ties. Vectors are consumed in
/// the order supplied by the caller.
inline ScheduleSolution greedy_schedule(const std::vector<FavorabilityVector>& vectors) {
  const auto t0 = std::chrono::steady_clock::now();
  detail::validate_instance(vectors);
  const std::size_t n = vectors.size();
  const FavorabilityMatrix full(vectors);
  const TrivialRowSplit split = strip_trivial_rows(full);
  const FavorabilityMatrix& red = split.reduced;
  const std::size_t m = red.num_rows();

  std::vector<std::size_t> order;
  if (m == 0 || n <= 2) {
    order = detail::identity_order(n);
    return detail::finish(full, std::move(order), "greedy", t0);
  }

  order = {0, 1};
  std::vector<detail::RowGaps> gaps(m);
  std::vector<int> cand(m);
  std::vector<int> incumbent(m);
  for (std::size_t ci = 2; ci < n; ++ci) {
    const std::size_t L = order.size();
    for (std::size_t r = 0; r < m; ++r) gaps[r].build(red, r, order);

    std::size_t best_p = 1;
    for (std::size_t r = 0; r < m; ++r)
      incumbent[r] = gaps[r].zero_run_after_insert(1, red.at(r, ci) != 0);
    std::sort(incumbent.begin(), incumbent.end(), std::greater<int>());

    for (std::size_t p = 2; p <= L; ++p) {
      for (std::size_t r = 0; r < m; ++r)
        cand[r] = gaps[r].zero_run_after_insert(static_cast<int>(p),
                                                red.at(r, ci) != 0);
      std::sort(cand.begin(), cand.end(), std::greater<int>());
      if (std::lexicographical_compare(cand.begin(), cand.end(), incumbent.begin(),
                                       incumbent.end())) {
        incumbent = cand;
        best_p = p;
      }
    }
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(best_p), ci);
  }
  return detail::finish(full, std::move(order), "greedy", t0);
}

/// Side-by-side instance comparison of the two solvers, optionally probing
/// the greedy result's sensitivity to the vector arrival order.
struct GapReport {
  ScheduleSolution brute_force;
  ScheduleSolution greedy;
  bool objectives_equal = false;
  int leading_gap = 0;  // greedy minus brute force, first objective element
  std::size_t shuffle_runs = 0;
  std::size_t shuffle_equal = 0;
  int shuffle_worst_leading_gap = 0;
};

inline GapReport evaluate_gap(const std::vector<FavorabilityVector>& vectors,
                              std::size_t repetitions, std::uint64_t rng_seed,
                              const SolverOptions& opts = {}) {
  GapReport report;
  report.brute_force = brute_force_schedule(vectors, opts);
  report.greedy = greedy_schedule(vectors);
  report.objectives_equal = report.greedy.objective == report.brute_force.objective;
  if (!report.greedy.objective.values.empty()) {
    report.leading_gap =
        report.greedy.objective.values[0] - report.brute_force.objective.values[0];
  }
  report.shuffle_runs = repetitions;
  auto rng = make_rng(derive_seed(rng_seed, 0x5A11));
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    const auto perm = random_permutation(vectors.size(), rng);
    std::vector<FavorabilityVector> shuffled;
    shuffled.reserve(vectors.size());
    for (auto i : perm) shuffled.push_back(vectors[i]);
    const auto sol = greedy_schedule(shuffled);
    if (sol.objective == report.brute_force.objective) ++report.shuffle_equal;
    if (!sol.objective.values.empty()) {
      report.shuffle_worst_leading_gap = std::max(
          report.shuffle_worst_leading_gap,
          sol.objective.values[0] - report.brute_force.objective.values[0]);
    }
  }
  return report;
}

}  // namespace psrsched
