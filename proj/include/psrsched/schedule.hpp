// Copyright (c) 2026 psrsched contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psrsched/errors.hpp"

namespace psrsched {

/// Binary favorability column describing one non-RTA station: entry j is 1
/// when RTA station j can run a reliable reduced-power transmission while
/// this station holds the triggered uplink.
struct FavorabilityVector {
  std::vector<std::uint8_t> entries;
  std::string sta_id;

  FavorabilityVector() = default;
  explicit FavorabilityVector(std::vector<std::uint8_t> e, std::string id = {})
      : entries(std::move(e)), sta_id(std::move(id)) {
    for (auto v : entries) {
      if (v > 1) throw InvalidInputError("FavorabilityVector: entries must be 0 or 1");
    }
  }

  std::size_t size() const { return entries.size(); }

  friend bool operator==(const FavorabilityVector& a, const FavorabilityVector& b) {
    return a.entries == b.entries && a.sta_id == b.sta_id;
  }
};

/// Ordered sequence of favorability columns. The column order is the
/// transmission order of non-RTA stations for one schedule period; row i
/// tracks RTA station i across that period.
class FavorabilityMatrix {
 public:
  FavorabilityMatrix() = default;
  explicit FavorabilityMatrix(std::vector<FavorabilityVector> cols)
      : columns_(std::move(cols)) {
    for (const auto& c : columns_) {
      if (c.size() != columns_.front().size())
        throw InvalidInputError("FavorabilityMatrix: columns must have equal length");
    }
  }

  static FavorabilityMatrix from_rows(const std::vector<std::vector<std::uint8_t>>& rows) {
    std::vector<FavorabilityVector> cols;
    if (rows.empty()) return FavorabilityMatrix{};
    const std::size_t n = rows.front().size();
    for (const auto& r : rows) {
      if (r.size() != n) throw InvalidInputError("from_rows: ragged rows");
    }
    cols.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::uint8_t> e(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) e[r] = rows[r][i];
      cols.emplace_back(std::move(e));
    }
    return FavorabilityMatrix(std::move(cols));
  }

  const std::vector<FavorabilityVector>& columns() const { return columns_; }
  std::vector<FavorabilityVector>& columns() { return columns_; }

  std::size_t num_columns() const { return columns_.size(); }
  std::size_t num_rows() const {
    return columns_.empty() ? 0 : columns_.front().size();
  }

  std::uint8_t at(std::size_t row, std::size_t col) const {
    return columns_[col].entries[row];
  }

  std::vector<std::uint8_t> row(std::size_t r) const {
    std::vector<std::uint8_t> out(num_columns());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = columns_[c].entries[r];
    return out;
  }

  /// Matrix with columns rearranged as columns[order[0]], columns[order[1]], ...
  FavorabilityMatrix reordered(std::span<const std::size_t> order) const {
    if (order.size() != num_columns())
      throw InvalidInputError("reordered: order length must equal column count");
    std::vector<FavorabilityVector> cols;
    cols.reserve(order.size());
    for (auto i : order) {
      if (i >= num_columns()) throw InvalidInputError("reordered: index out of range");
      cols.push_back(columns_[i]);
    }
    return FavorabilityMatrix(std::move(cols));
  }

  friend bool operator==(const FavorabilityMatrix& a, const FavorabilityMatrix& b) {
    return a.columns_ == b.columns_;
  }

 private:
  std::vector<FavorabilityVector> columns_;
};

/// Per-row worst zero-run lengths sorted non-increasing; the quantity the
/// schedule optimizers compare lexicographically.
struct ObjectiveVector {
  std::vector<int> values;

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

/// Longest run of zeros in the periodic repetition of `row`. Scanning the
/// doubled sequence suffices when the row contains a 1; an all-zero row
/// reports the row length itself as a finite "never favorable" value, and an
/// all-one row reports 0.
inline int max_circular_zero_run(std::span<const std::uint8_t> row) {
  if (row.empty()) throw InvalidInputError("max_circular_zero_run: empty row");
  const std::size_t n = row.size();
  bool has_one = false;
  for (auto v : row) {
    if (v != 0) {
      has_one = true;
      break;
    }
  }
  if (!has_one) return static_cast<int>(n);
  int best = 0;
  int run = 0;
  for (std::size_t k = 0; k < 2 * n; ++k) {
    if (row[k % n] == 0) {
      ++run;
      if (run > best) best = run;
    } else {
      run = 0;
    }
  }
  return best;
}

inline int max_circular_zero_run(const std::vector<std::uint8_t>& row) {
  return max_circular_zero_run(std::span<const std::uint8_t>(row));
}

/// Unsorted per-row zero-run values for the matrix in its current column order.
inline std::vector<int> row_zero_runs(const FavorabilityMatrix& f) {
  if (f.num_columns() == 0)
    throw InvalidInputError("row_zero_runs: matrix has zero columns");
  std::vector<int> z(f.num_rows());
  for (std::size_t r = 0; r < z.size(); ++r) z[r] = max_circular_zero_run(f.row(r));
  return z;
}

inline ObjectiveVector objective_vector(const FavorabilityMatrix& f) {
  auto z = row_zero_runs(f);
  std::sort(z.begin(), z.end(), std::greater<int>());
  return ObjectiveVector{std::move(z)};
}

/// Strict lexicographic order on equal-length objective vectors.
inline bool lexicographically_less(const ObjectiveVector& v, const ObjectiveVector& w) {
  if (v.values.size() != w.values.size())
    throw InvalidInputError("lexicographically_less: length mismatch");
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    if (v.values[i] < w.values[i]) return true;
    if (v.values[i] > w.values[i]) return false;
  }
  return false;
}

/// Result of removing rows that no column permutation can change: all-one
/// rows always score 0 and all-zero rows always score N.
struct TrivialRowSplit {
  FavorabilityMatrix reduced;
  /// For each original row: index into the reduced matrix, or empty if trivial.
  std::vector<std::optional<std::size_t>> row_map;
  /// Fixed zero-run value for trivial rows; unused entries are 0.
  std::vector<int> fixed_z;

  std::size_t num_original_rows() const { return row_map.size(); }

  /// Rebuilds per-row zero-run values for the full matrix from the values
  /// computed on the reduced one.
  std::vector<int> reattach(const std::vector<int>& reduced_z) const {
    std::vector<int> full(row_map.size());
    for (std::size_t r = 0; r < row_map.size(); ++r) {
      if (row_map[r]) {
        if (*row_map[r] >= reduced_z.size())
          throw InvalidInputError("reattach: reduced value vector too short");
        full[r] = reduced_z[*row_map[r]];
      } else {
        full[r] = fixed_z[r];
      }
    }
    return full;
  }
};

inline TrivialRowSplit strip_trivial_rows(const FavorabilityMatrix& f) {
  TrivialRowSplit out;
  const std::size_t m = f.num_rows();
  const std::size_t n = f.num_columns();
  out.row_map.resize(m);
  out.fixed_z.assign(m, 0);

  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < m; ++r) {
    bool any_zero = false;
    bool any_one = false;
    for (std::size_t c = 0; c < n; ++c) {
      (f.at(r, c) ? any_one : any_zero) = true;
    }
    if (any_zero && any_one) {
      out.row_map[r] = kept.size();
      kept.push_back(r);
    } else {
      out.fixed_z[r] = any_zero ? static_cast<int>(n) : 0;
    }
  }

  std::vector<FavorabilityVector> cols;
  cols.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::uint8_t> e(kept.size());
    for (std::size_t k = 0; k < kept.size(); ++k) e[k] = f.at(kept[k], c);
    cols.emplace_back(std::move(e), f.columns()[c].sta_id);
  }
  out.reduced = FavorabilityMatrix(std::move(cols));
  return out;
}

}  // namespace psrsched
