// Copyright (c) 2026 psrsched contributors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each numbered check prints one PASS/FAIL line;
// the process exits nonzero if any check fails. Checks 4-8 share two
// comparative simulation studies (two and four RTA stations, ten placements
// each) mirroring the reference two-apartment layout.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "psrsched/random.hpp"
#include "psrsched/scenario.hpp"
#include "psrsched/sim.hpp"
#include "psrsched/solvers.hpp"

using namespace psrsched;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& details) {
  std::printf("criterion %2d [%s]: %s — %s\n", id, name.c_str(),
              pass ? "PASS" : "FAIL", details.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// --- independent oracles -----------------------------------------------------

// Longest zero run among maximal runs starting inside the middle copy of an
// explicit triple repetition.
int triple_oracle(const std::vector<std::uint8_t>& row) {
  const std::size_t n = row.size();
  bool any_one = false;
  for (auto v : row) any_one = any_one || v != 0;
  if (!any_one) return static_cast<int>(n);
  std::vector<std::uint8_t> triple;
  for (int rep = 0; rep < 3; ++rep) triple.insert(triple.end(), row.begin(), row.end());
  int best = 0;
  for (std::size_t start = n; start < 2 * n; ++start) {
    if (triple[start] != 0 || triple[start - 1] == 0) continue;
    std::size_t end = start;
    while (end < triple.size() && triple[end] == 0) ++end;
    best = std::max(best, static_cast<int>(end - start));
  }
  return best;
}

// Exhaustive lexicographic minimum over every permutation of all N columns.
ObjectiveVector naive_enumeration(const std::vector<FavorabilityVector>& vectors) {
  const FavorabilityMatrix f(vectors);
  std::vector<std::size_t> perm(vectors.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  ObjectiveVector best = objective_vector(f.reordered(perm));
  while (std::next_permutation(perm.begin(), perm.end())) {
    const auto obj = objective_vector(f.reordered(perm));
    if (lexicographically_less(obj, best)) best = obj;
  }
  return best;
}

std::vector<FavorabilityVector> random_instance(std::mt19937_64& rng, std::size_t n,
                                                std::size_t m, bool nontrivial_rows) {
  std::vector<std::vector<std::uint8_t>> rows(m, std::vector<std::uint8_t>(n));
  for (auto& row : rows) {
    bool ok = false;
    while (!ok) {
      bool any0 = false, any1 = false;
      for (auto& v : row) {
        v = static_cast<std::uint8_t>(uniform_index(rng, 2));
        (v ? any1 : any0) = true;
      }
      ok = !nontrivial_rows || (any0 && any1);
    }
  }
  return FavorabilityMatrix::from_rows(rows).columns();
}

// --- comparative study shared by checks 4-8 ----------------------------------

struct PolicyStats {
  std::vector<double> quantiles_ms;  // per placement
  std::size_t lost = 0;
  std::size_t total = 0;
  std::vector<double> avg_throughput;  // per placement
  std::vector<double> jain;            // per placement
};

struct Study {
  PolicyStats baseline, greedy, brute;
  std::size_t total_samples = 0;
  bool ran_brute = false;
};

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

Study run_study(std::size_t num_rta, double t_rta_ms, std::size_t placements,
                double sim_duration_s, bool include_brute) {
  ScenarioSpec spec = make_reference_scenario(num_rta);
  spec.config.t_rta_ms = t_rta_ms;
  spec.config.sim_duration_s = sim_duration_s;
  spec.config.warmup_duration_s = 0.1 * sim_duration_s;

  Study study;
  study.ran_brute = include_brute;
  for (std::size_t p = 0; p < placements; ++p) {
    const ScenarioConfig cfg = placement_config(spec, p);
    const FavorabilityMatrix matrix = classify_favorability(cfg.deployment, cfg.link);

    const auto greedy_order = greedy_schedule(matrix.columns()).order;
    std::vector<std::size_t> brute_order;
    if (include_brute) brute_order = brute_force_schedule(matrix.columns()).order;

    const std::uint64_t seed = run_seed(spec.root_seed, p);
    auto record = [&](PolicyStats& stats, const SchedulePolicy& policy) {
      const SimReport rep = run_simulation(cfg, policy, seed);
      stats.quantiles_ms.push_back(rep.derived.delay_quantile_ms
                                       ? *rep.derived.delay_quantile_ms
                                       : std::numeric_limits<double>::infinity());
      std::size_t lost = rep.rta_delays.undelivered;
      for (double d : rep.rta_delays.delays_ms) lost += d > cfg.delay_bound_ms ? 1 : 0;
      stats.lost += lost;
      stats.total += rep.rta_delays.total();
      stats.avg_throughput.push_back(rep.derived.avg_throughput_mbps);
      stats.jain.push_back(rep.derived.jain.value_or(0.0));
      study.total_samples += rep.rta_delays.total();
    };

    record(study.baseline, SchedulePolicy::airtime_fair());
    record(study.greedy, SchedulePolicy::fixed_order(greedy_order));
    if (include_brute) record(study.brute, SchedulePolicy::fixed_order(brute_order));
  }
  return study;
}

double pooled_loss(const PolicyStats& s) {
  return static_cast<double>(s.lost) / static_cast<double>(s.total);
}

// --- CLI helpers for the determinism check ------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_command(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

int main() {
  // 1: exact zero-run counting against the independent oracle.
  {
    const auto t0 = Clock::now();
    bool pass = max_circular_zero_run(std::vector<std::uint8_t>{0, 1, 0, 1, 0, 0}) == 3;
    std::size_t mismatches = 0;
    auto rng = make_rng(0xACC01);
    for (int it = 0; it < 100000; ++it) {
      const auto n = 1 + uniform_index(rng, 32);
      std::vector<std::uint8_t> row(n);
      for (auto& v : row) v = static_cast<std::uint8_t>(uniform_index(rng, 2));
      if (max_circular_zero_run(row) != triple_oracle(row)) ++mismatches;
    }
    const double dt = seconds_since(t0);
    pass = pass && mismatches == 0 && dt < 1.0;
    report(1, "objective exactness", pass,
           "worked example ok, mismatches=" + std::to_string(mismatches) + "/100000, " +
               fmt(dt) + " s (< 1 s)");
  }

  // 2: rotation-fixed brute force equals naive full enumeration.
  {
    const auto t0 = Clock::now();
    std::size_t mismatches = 0;
    auto rng = make_rng(0xACC02);
    for (int it = 0; it < 500; ++it) {
      const auto n = 2 + uniform_index(rng, 5);  // 2..6
      const auto m = 1 + uniform_index(rng, 5);  // 1..5
      const auto vectors = random_instance(rng, n, m, false);
      if (!(brute_force_schedule(vectors).objective == naive_enumeration(vectors)))
        ++mismatches;
    }
    const double dt = seconds_since(t0);
    const bool pass = mismatches == 0 && dt < 30.0;
    report(2, "brute-force oracle equivalence", pass,
           "mismatches=" + std::to_string(mismatches) + "/500, " + fmt(dt) +
               " s (< 30 s)");
  }

  // 3: greedy soundness on 1000 instances; equality rate is reported, not gated.
  {
    std::size_t below = 0, equal = 0, leading_equal = 0, count = 0;
    auto rng = make_rng(0xACC03);
    for (std::size_t m : {2u, 4u}) {
      for (int it = 0; it < 500; ++it) {
        const auto vectors = random_instance(rng, 8, m, true);
        const auto g = greedy_schedule(vectors);
        const auto b = brute_force_schedule(vectors);
        if (lexicographically_less(g.objective, b.objective)) ++below;
        if (g.objective == b.objective) ++equal;
        if (g.objective.values[0] == b.objective.values[0]) ++leading_equal;
        ++count;
      }
    }
    const bool pass = below == 0;
    report(3, "greedy soundness and quality", pass,
           "never below brute force (" + std::to_string(below) + "/1000 violations); " +
               "objective equality rate " + fmt(double(equal) / double(count)) +
               ", leading-element equality rate " +
               fmt(double(leading_equal) / double(count)));
  }

  // Shared study for 4-8: two RTA stations, T_RTA = 20 ms, ten placements.
  const auto study_t0 = Clock::now();
  const Study m2 = run_study(2, 20.0, 10, 115.0, true);
  const double m2_elapsed = seconds_since(study_t0);

  // 4: greedy's delay quantile stays within 5% of the exact schedule's.
  {
    const double g = mean(m2.greedy.quantiles_ms);
    const double b = mean(m2.brute.quantiles_ms);
    const bool finite = std::isfinite(g) && std::isfinite(b);
    const bool pass = finite && g <= 1.05 * b && m2.total_samples >= 100000;
    report(4, "greedy/brute downstream gap", pass,
           "greedy " + fmt(g) + " ms vs brute " + fmt(b) + " ms (ratio " + fmt(g / b) +
               ", <= 1.05), samples " + std::to_string(m2.total_samples) +
               " (>= 100000)");
  }

  // 5: the RTA-aware schedule at least 30%-improves the 0.999 delay quantile.
  {
    const double g = mean(m2.greedy.quantiles_ms);
    const double base = mean(m2.baseline.quantiles_ms);
    const bool pass = std::isfinite(g) && g <= 0.7 * base && m2_elapsed < 300.0;
    report(5, "headline delay gain, M=2", pass,
           "greedy " + fmt(g) + " ms vs baseline " + fmt(base) + " ms (ratio " +
               fmt(g / base) + ", <= 0.7), study took " + fmt(m2_elapsed) +
               " s (< 300 s)");
  }

  // 6: with four RTA stations the gain still clears 25%.
  {
    const Study m4 = run_study(4, 20.0, 10, 115.0, false);
    const double g = mean(m4.greedy.quantiles_ms);
    const double base = mean(m4.baseline.quantiles_ms);
    const bool pass = std::isfinite(g) && g <= 0.75 * base;
    report(6, "headline delay gain, M=4", pass,
           "greedy " + fmt(g) + " ms vs baseline " + fmt(base) + " ms (ratio " +
               fmt(g / base) + ", <= 0.75)");
  }

  // 7: order-of-magnitude loss-ratio reduction at the 20 ms bound.
  {
    const double lb = pooled_loss(m2.baseline);
    const double lg = pooled_loss(m2.greedy);
    const bool applicable = lb >= 1e-3;
    const bool pass = !applicable || lg <= 0.1 * lb;
    report(7, "loss-ratio gain", pass,
           "baseline " + fmt(lb) + ", greedy " + fmt(lg) +
               (applicable ? " (ratio " + fmt(lg / lb) + ", <= 0.1)"
                           : " (baseline below 1e-3; check vacuous)"));
  }

  // 8: the non-RTA BSS is not harmed: equal average throughput, fair shares.
  {
    const double tb = mean(m2.baseline.avg_throughput);
    const double tg = mean(m2.greedy.avg_throughput);
    const double rel = std::abs(tg - tb) / tb;
    double min_jain = 1.0;
    for (const auto* s : {&m2.baseline, &m2.greedy, &m2.brute})
      for (double j : s->jain) min_jain = std::min(min_jain, j);
    const bool pass = rel <= 0.05 && min_jain >= 0.95;
    report(8, "non-RTA neutrality", pass,
           "avg throughput baseline " + fmt(tb) + " vs greedy " + fmt(tg) +
               " Mb/s (diff " + fmt(100 * rel) + "%, <= 5%), min Jain " +
               fmt(min_jain, "%.5g") + " (>= 0.95)");
  }

  // 9: identical CLI invocations produce byte-identical CSV.
  {
    const fs::path base = fs::temp_directory_path() / "psrsched_acceptance";
    std::error_code ec;
    fs::remove_all(base, ec);
    fs::create_directories(base);
    const std::string scenario = std::string(PSRSCHED_SCENARIO_DIR) + "/two_apartment_m2.json";
    const std::string common = std::string("\"") + PSRSCHED_CLI_PATH + "\" simulate \"" +
                               scenario +
                               "\" --policy greedy --seeds 3 --duration-s 10 --quiet --out ";
    const int rc1 = run_command(common + "\"" + (base / "a").string() + "\"");
    const int rc2 = run_command(common + "\"" + (base / "b").string() + "\"");
    const std::string csv_a = slurp(base / "a" / "simulate.csv");
    const std::string csv_b = slurp(base / "b" / "simulate.csv");
    const bool pass = rc1 == 0 && rc2 == 0 && !csv_a.empty() && csv_a == csv_b;
    report(9, "determinism", pass,
           "exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2) + ", " +
               std::to_string(csv_a.size()) + " bytes, identical=" +
               (csv_a == csv_b ? "yes" : "no"));
    fs::remove_all(base, ec);
  }

  // 10: solver performance envelope.
  {
    auto rng = make_rng(0xACC10);
    const auto big = random_instance(rng, 32, 16, true);
    double best_greedy_ms = 1e100;
    for (int rep = 0; rep < 5; ++rep) {
      const auto sol = greedy_schedule(big);
      best_greedy_ms = std::min(
          best_greedy_ms, std::chrono::duration<double, std::milli>(sol.elapsed).count());
    }
    const auto brute_inst = random_instance(rng, 8, 4, true);
    const auto bsol = brute_force_schedule(brute_inst);
    const double brute_s = std::chrono::duration<double>(bsol.elapsed).count();
    const bool pass = best_greedy_ms < 10.0 && brute_s < 5.0;
    report(10, "performance envelope", pass,
           "greedy N=32,M=16: " + fmt(best_greedy_ms) + " ms (< 10 ms); brute N=8,M=4: " +
               fmt(brute_s) + " s (< 5 s)");
  }

  if (g_failures) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
