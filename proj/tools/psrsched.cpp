// Copyright (c) 2026 psrsched contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: scenario classification, schedule solving,
// comparative simulation, parameter sweeps, and solver benchmarks.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psrsched/report_io.hpp"
#include "psrsched/scenario.hpp"
#include "psrsched/sim.hpp"
#include "psrsched/solvers.hpp"

namespace {

using namespace psrsched;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitRuntime = 4;

struct Log {
  int level = 1;  // 0 quiet, 1 normal, 2 verbose
  void info(const std::string& msg) const {
    if (level >= 1) std::cerr << msg << "\n";
  }
  void verbose(const std::string& msg) const {
    if (level >= 2) std::cerr << msg << "\n";
  }
  void warn(const std::string& msg) const { std::cerr << "warning: " << msg << "\n"; }
};

/// Writes the command's document to --out DIR/<name> or stdout.
class Output {
 public:
  explicit Output(std::optional<std::string> dir) : dir_(std::move(dir)) {}

  std::ostream& open(const std::string& name) {
    if (!dir_) return std::cout;
    fs::create_directories(*dir_);
    path_ = fs::path(*dir_) / name;
    file_.open(path_);
    if (!file_) throw ConfigError("cannot open output file " + path_.string());
    return file_;
  }

  std::string where() const { return dir_ ? path_.string() : "stdout"; }

 private:
  std::optional<std::string> dir_;
  fs::path path_;
  std::ofstream file_;
};

std::vector<std::string> sta_ids(const ScenarioConfig& cfg) {
  std::vector<std::string> ids;
  const std::size_t n = cfg.num_nonrta();
  for (std::size_t i = 0; i < n; ++i) {
    std::string id;
    if (i < cfg.deployment.nonrta_stas.size()) id = cfg.deployment.nonrta_stas[i].id;
    if (id.empty() && cfg.favorability_override)
      id = cfg.favorability_override->columns()[i].sta_id;
    if (id.empty()) id = "non-rta-" + std::to_string(i);
    ids.push_back(std::move(id));
  }
  return ids;
}

std::vector<std::string> rta_ids(const ScenarioConfig& cfg) {
  std::vector<std::string> ids;
  const std::size_t m = cfg.num_rta();
  for (std::size_t j = 0; j < m; ++j) {
    std::string id;
    if (j < cfg.deployment.rta_stas.size()) id = cfg.deployment.rta_stas[j].id;
    if (id.empty()) id = "rta-" + std::to_string(j);
    ids.push_back(std::move(id));
  }
  return ids;
}

FavorabilityMatrix favorability_of(const ScenarioConfig& cfg) {
  if (cfg.favorability_override) return *cfg.favorability_override;
  if (cfg.deployment.nonrta_stas.empty())
    throw ValidationError("scenario: geometry or favorability_override required");
  return classify_favorability(cfg.deployment, cfg.link);
}

SchedulePolicy policy_for(const std::string& name, const ScenarioConfig& cfg,
                          const SolverOptions& opts) {
  if (name == "baseline") return SchedulePolicy::airtime_fair();
  const auto matrix = favorability_of(cfg);
  if (name == "greedy")
    return SchedulePolicy::fixed_order(greedy_schedule(matrix.columns()).order);
  if (name == "brute")
    return SchedulePolicy::fixed_order(brute_force_schedule(matrix.columns(), opts).order);
  throw ValidationError("unknown policy '" + name + "'");
}

// ---------------------------------------------------------------------------
// solve

int cmd_solve(const std::string& file, const std::string& solver,
              const std::string& format, std::size_t brute_cap,
              const ScenarioOverrides& overrides, Output& out, const Log& log) {
  const ScenarioSpec spec = load_scenario_file(file, overrides);
  const ScenarioConfig cfg = placement_config(spec);
  const FavorabilityMatrix matrix = favorability_of(cfg);
  if (matrix.num_rows() == 0)
    log.warn("scenario has no RTA stations; the objective is empty");

  SolverOptions opts;
  opts.brute_force_max_n = brute_cap;

  std::vector<ScheduleSolution> solutions;
  std::optional<GapReport> gap;
  if (solver == "both") {
    gap = evaluate_gap(matrix.columns(), 0, spec.root_seed, opts);
    solutions = {gap->greedy, gap->brute_force};
  } else if (solver == "greedy") {
    solutions = {greedy_schedule(matrix.columns())};
  } else if (solver == "brute") {
    solutions = {brute_force_schedule(matrix.columns(), opts)};
  } else {
    throw ValidationError("unknown solver '" + solver + "'");
  }

  const auto ids = sta_ids(cfg);
  const auto rids = rta_ids(cfg);

  if (format == "json") {
    nlohmann::json doc;
    doc["root_seed"] = spec.root_seed;
    doc["n"] = matrix.num_columns();
    doc["m"] = matrix.num_rows();
    for (const auto& sol : solutions) {
      nlohmann::json js;
      js["solver"] = sol.solver_tag;
      js["order"] = sol.order;
      nlohmann::json order_ids = nlohmann::json::array();
      for (auto i : sol.order) order_ids.push_back(ids[i]);
      js["order_ids"] = order_ids;
      js["objective"] = sol.objective.values;
      js["row_z"] = row_zero_runs(matrix.reordered(sol.order));
      js["elapsed_us"] = static_cast<double>(sol.elapsed.count()) / 1000.0;
      doc["solutions"].push_back(js);
    }
    if (gap) {
      doc["gap"] = {{"objectives_equal", gap->objectives_equal},
                    {"leading_gap", gap->leading_gap}};
    }
    out.open("solve.json") << doc.dump(2) << "\n";
    return kExitOk;
  }

  auto& os = out.open("solve.txt");
  os << "root_seed: " << spec.root_seed << "\n";
  for (const auto& sol : solutions) {
    os << "solver: " << sol.solver_tag << "\n";
    os << "order:";
    for (auto i : sol.order) os << " " << ids[i];
    os << "\norder_indices:";
    for (auto i : sol.order) os << " " << i;
    os << "\nobjective:";
    for (int v : sol.objective.values) os << " " << v;
    os << "\nrow_z:";
    const auto rz = row_zero_runs(matrix.reordered(sol.order));
    for (std::size_t j = 0; j < rz.size(); ++j) os << " " << rids[j] << "=" << rz[j];
    os << "\nelapsed_us: " << format_value(static_cast<double>(sol.elapsed.count()) / 1000.0)
       << "\n";
  }
  if (gap) {
    os << "objectives_equal: " << (gap->objectives_equal ? "true" : "false") << "\n";
    os << "leading_gap: " << gap->leading_gap << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// classify

int cmd_classify(const std::string& file, const std::string& format,
                 std::optional<std::size_t> window, const ScenarioOverrides& overrides,
                 Output& out, const Log& log) {
  const ScenarioSpec spec = load_scenario_file(file, overrides);
  const ScenarioConfig cfg = placement_config(spec);
  if (cfg.favorability_override)
    throw ValidationError(
        "classify requires a geometric scenario; remove favorability_override");
  if (cfg.deployment.nonrta_stas.empty())
    throw ValidationError("classify: scenario has no non-RTA stations");

  const auto table = sinr_table(cfg.deployment, cfg.link);
  const auto round = classify_favorability(cfg.deployment, cfg.link);

  const std::size_t k = window.value_or(cfg.classification_window);
  MeasurementGrid grid(round.num_columns(), round.num_rows(), k);
  for (std::size_t rounds = 0; rounds < k; ++rounds) grid.record_round(round);
  const auto windowed = grid.windowed();

  const auto ids = sta_ids(cfg);
  const auto rids = rta_ids(cfg);
  log.verbose("classified " + std::to_string(ids.size()) + " x " +
              std::to_string(rids.size()) + " pairs");

  if (format == "json") {
    nlohmann::json doc;
    doc["root_seed"] = spec.root_seed;
    doc["nonrta_ids"] = ids;
    doc["rta_ids"] = rids;
    doc["sinr_db"] = table;
    std::vector<std::vector<int>> rows(windowed.num_rows(),
                                       std::vector<int>(windowed.num_columns()));
    for (std::size_t j = 0; j < windowed.num_rows(); ++j)
      for (std::size_t i = 0; i < windowed.num_columns(); ++i)
        rows[j][i] = windowed.at(j, i);
    doc["matrix"] = rows;
    out.open("classify.json") << doc.dump(2) << "\n";
    return kExitOk;
  }

  auto& os = out.open("classify.csv");
  write_csv_row(os, {"root_seed", "nonrta_sta", "rta_sta", "sinr_db", "favorable"});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = 0; j < rids.size(); ++j) {
      write_csv_row(os, {std::to_string(spec.root_seed), ids[i], rids[j],
                         format_value(table[j][i]), windowed.at(j, i) ? "1" : "0"});
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct MetricRow {
  std::string metric;
  std::string key;
  std::optional<double> value;
};

std::vector<MetricRow> run_metrics(const SimReport& r, const std::vector<std::string>& ids) {
  std::vector<MetricRow> rows;
  rows.push_back({"delay_quantile_ms", "", r.derived.delay_quantile_ms});
  rows.push_back({"loss_ratio", "", r.derived.loss_ratio});
  rows.push_back({"avg_throughput_mbps", "", r.derived.avg_throughput_mbps});
  rows.push_back({"jain", "", r.derived.jain});
  for (std::size_t s = 0; s < r.nonrta_throughput_mbps.size(); ++s)
    rows.push_back({"throughput_mbps", ids[s], r.nonrta_throughput_mbps[s]});
  rows.push_back({"psr_transmissions", "", static_cast<double>(r.events.psr_transmissions)});
  rows.push_back({"gap_transmissions", "", static_cast<double>(r.events.gap_transmissions)});
  rows.push_back(
      {"denied_opportunities", "", static_cast<double>(r.events.denied_opportunities)});
  rows.push_back({"rta_generated", "", static_cast<double>(r.rta_generated)});
  rows.push_back({"rta_delivered", "", static_cast<double>(r.rta_delivered)});
  rows.push_back(
      {"rta_undelivered", "", static_cast<double>(r.rta_delays.undelivered)});
  return rows;
}

struct Aggregate {
  double mean = 0, lo = 0, hi = 0;
  std::size_t count = 0;
};

std::map<std::pair<std::string, std::string>, Aggregate> aggregate_metrics(
    const std::vector<std::vector<MetricRow>>& per_run) {
  std::map<std::pair<std::string, std::string>, Aggregate> agg;
  for (const auto& rows : per_run) {
    for (const auto& row : rows) {
      if (!row.value) continue;
      auto& a = agg[{row.metric, row.key}];
      if (a.count == 0) {
        a.lo = a.hi = *row.value;
      } else {
        a.lo = std::min(a.lo, *row.value);
        a.hi = std::max(a.hi, *row.value);
      }
      a.mean += *row.value;
      ++a.count;
    }
  }
  for (auto& [k, a] : agg) a.mean /= static_cast<double>(a.count);
  return agg;
}

int cmd_simulate(const std::string& file, const std::string& policy_name,
                 std::size_t seeds, const std::string& format, std::size_t brute_cap,
                 const ScenarioOverrides& overrides, Output& out, const Log& log) {
  const ScenarioSpec spec = load_scenario_file(file, overrides);
  const ScenarioConfig cfg = placement_config(spec);
  if (cfg.num_rta() == 0)
    log.warn("scenario has no RTA stations; delay and loss columns will be empty");

  SolverOptions opts;
  opts.brute_force_max_n = brute_cap;
  const SchedulePolicy policy = policy_for(policy_name, cfg, opts);
  const auto ids = sta_ids(cfg);

  std::vector<SimReport> reports;
  std::vector<std::vector<MetricRow>> per_run;
  for (std::size_t i = 0; i < seeds; ++i) {
    const auto seed = run_seed(spec.root_seed, i);
    log.verbose("running seed " + std::to_string(seed));
    reports.push_back(run_simulation(cfg, policy, seed));
    per_run.push_back(run_metrics(reports.back(), ids));
  }
  const auto agg = aggregate_metrics(per_run);

  if (format == "json") {
    nlohmann::json doc;
    doc["root_seed"] = spec.root_seed;
    doc["policy"] = policy_name;
    doc["runs"] = nlohmann::json::array();
    for (const auto& r : reports) doc["runs"].push_back(to_json(r));
    nlohmann::json ja;
    for (const auto& [key, a] : agg) {
      nlohmann::json entry = {{"mean", a.mean}, {"min", a.lo}, {"max", a.hi}};
      if (!key.second.empty()) entry["key"] = key.second;
      ja[key.first].push_back(entry);
    }
    doc["aggregate"] = ja;
    out.open("simulate.json") << doc.dump(2) << "\n";
    return kExitOk;
  }

  auto& os = out.open("simulate.csv");
  write_csv_row(os, {"root_seed", "policy", "scope", "seed", "metric", "key", "value"});
  const std::string root = std::to_string(spec.root_seed);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (const auto& row : per_run[i]) {
      write_csv_row(os, {root, policy_name, "run", std::to_string(reports[i].seed),
                         row.metric, row.key, row.value ? format_value(*row.value) : ""});
    }
  }
  for (const auto& [key, a] : agg) {
    write_csv_row(os, {root, policy_name, "mean", "", key.first, key.second,
                       format_value(a.mean)});
    write_csv_row(os, {root, policy_name, "min", "", key.first, key.second,
                       format_value(a.lo)});
    write_csv_row(os, {root, policy_name, "max", "", key.first, key.second,
                       format_value(a.hi)});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const std::string& file, std::vector<double> trta,
              std::size_t placements, std::vector<std::string> policies,
              std::size_t seeds, std::size_t brute_cap,
              const ScenarioOverrides& overrides, Output& out, const Log& log) {
  const ScenarioSpec spec = load_scenario_file(file, overrides);
  if (trta.empty()) trta = {5, 10, 15, 20, 25, 30};
  std::sort(trta.begin(), trta.end());
  trta.erase(std::unique(trta.begin(), trta.end()), trta.end());

  const std::vector<std::string> canonical = {"baseline", "greedy", "brute"};
  if (policies.empty()) policies = canonical;
  std::vector<std::string> ordered;
  for (const auto& name : canonical) {
    if (std::find(policies.begin(), policies.end(), name) != policies.end())
      ordered.push_back(name);
  }
  if (ordered.size() != policies.size())
    throw ValidationError("sweep: policies must be drawn from baseline,greedy,brute");

  SolverOptions opts;
  opts.brute_force_max_n = brute_cap;

  auto& os = out.open("sweep.csv");
  write_csv_row(os, {"root_seed", "trta_ms", "placement", "policy", "metric", "value"});
  const std::string root = std::to_string(spec.root_seed);

  for (std::size_t p = 0; p < placements; ++p) {
    const ScenarioConfig base = placement_config(spec, p);
    // Orders depend on the placement only, not on the traffic period.
    std::map<std::string, SchedulePolicy> cell_policies;
    for (const auto& name : ordered) cell_policies.emplace(name, policy_for(name, base, opts));
    log.info("placement " + std::to_string(p + 1) + "/" + std::to_string(placements));

    for (double t : trta) {
      for (const auto& name : ordered) {
        ScenarioConfig cfg = base;
        cfg.t_rta_ms = t;
        std::vector<std::vector<MetricRow>> per_run;
        std::vector<std::string> ids = sta_ids(cfg);
        std::size_t samples = 0;
        for (std::size_t i = 0; i < seeds; ++i) {
          const auto rep = run_simulation(cfg, cell_policies.at(name), run_seed(spec.root_seed, i));
          samples += rep.rta_delays.total();
          per_run.push_back(run_metrics(rep, ids));
        }
        const auto agg = aggregate_metrics(per_run);
        auto cell = [&](const std::string& metric) -> std::string {
          auto it = agg.find({metric, ""});
          return it == agg.end() ? std::string{} : format_value(it->second.mean);
        };
        const std::string trta_str = format_value(t);
        const std::string pl_str = std::to_string(p);
        write_csv_row(os, {root, trta_str, pl_str, name, "delay_quantile_ms",
                           cell("delay_quantile_ms")});
        write_csv_row(os, {root, trta_str, pl_str, name, "loss_ratio", cell("loss_ratio")});
        write_csv_row(os, {root, trta_str, pl_str, name, "avg_throughput_mbps",
                           cell("avg_throughput_mbps")});
        write_csv_row(os, {root, trta_str, pl_str, name, "jain", cell("jain")});
        write_csv_row(os, {root, trta_str, pl_str, name, "rta_samples",
                           format_value(static_cast<double>(samples))});
        os.flush();  // partial results survive an interrupt
      }
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

std::vector<std::size_t> parse_size_list(const std::vector<std::string>& items,
                                         const char* what) {
  std::vector<std::size_t> out;
  for (const auto& item : items) {
    const auto dots = item.find("..");
    try {
      if (dots != std::string::npos) {
        const std::size_t lo = std::stoul(item.substr(0, dots));
        const std::size_t hi = std::stoul(item.substr(dots + 2));
        if (lo == 0 || hi < lo) throw std::invalid_argument("range");
        for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        const std::size_t v = std::stoul(item);
        if (v == 0) throw std::invalid_argument("zero");
        out.push_back(v);
      }
    } catch (const std::exception&) {
      throw ValidationError(std::string("bench: bad ") + what + " value '" + item + "'");
    }
  }
  return out;
}

std::vector<FavorabilityVector> random_bench_instance(std::mt19937_64& rng, std::size_t n,
                                                      std::size_t m) {
  std::vector<std::vector<std::uint8_t>> rows(m, std::vector<std::uint8_t>(n));
  for (auto& row : rows) {
    bool ok = false;
    while (!ok) {
      bool any0 = false, any1 = false;
      for (auto& v : row) {
        v = static_cast<std::uint8_t>(uniform_index(rng, 2));
        (v ? any1 : any0) = true;
      }
      ok = any0 && any1;  // rows must mix zeros and ones
    }
  }
  return FavorabilityMatrix::from_rows(rows).columns();
}

int cmd_bench(const std::vector<std::string>& n_items,
              const std::vector<std::string>& m_items, std::size_t instances,
              std::uint64_t seed, std::size_t brute_cap, const std::string& format,
              Output& out, const Log& log) {
  const auto ns = parse_size_list(n_items, "n");
  const auto ms = parse_size_list(m_items, "m");
  SolverOptions opts;
  opts.brute_force_max_n = brute_cap;

  struct BenchRow {
    std::size_t n, m;
    bool has_brute = false;
    double equality_rate = 0;
    std::map<int, std::size_t> gap_histogram;
    double greedy_mean_us = 0;
    double brute_mean_us = 0;
  };
  std::vector<BenchRow> table;

  for (auto n : ns) {
    for (auto m : ms) {
      BenchRow row;
      row.n = n;
      row.m = m;
      row.has_brute = n <= opts.brute_force_max_n;
      if (!row.has_brute)
        log.warn("n=" + std::to_string(n) + " exceeds the brute-force cap; column omitted");
      auto rng = make_rng(derive_seed(seed, n, m));
      std::size_t equal = 0;
      double greedy_ns = 0, brute_ns = 0;
      for (std::size_t inst = 0; inst < instances; ++inst) {
        const auto vectors = random_bench_instance(rng, n, m);
        const auto g = greedy_schedule(vectors);
        greedy_ns += static_cast<double>(g.elapsed.count());
        if (row.has_brute) {
          const auto b = brute_force_schedule(vectors, opts);
          brute_ns += static_cast<double>(b.elapsed.count());
          if (g.objective == b.objective) ++equal;
          ++row.gap_histogram[g.objective.values.empty()
                                  ? 0
                                  : g.objective.values[0] - b.objective.values[0]];
        }
      }
      row.greedy_mean_us = greedy_ns / 1000.0 / static_cast<double>(instances);
      if (row.has_brute) {
        row.brute_mean_us = brute_ns / 1000.0 / static_cast<double>(instances);
        row.equality_rate = static_cast<double>(equal) / static_cast<double>(instances);
      }
      table.push_back(std::move(row));
      log.verbose("bench n=" + std::to_string(n) + " m=" + std::to_string(m) + " done");
    }
  }

  auto histogram_str = [](const std::map<int, std::size_t>& h) {
    std::ostringstream ss;
    bool first = true;
    for (const auto& [gap, count] : h) {
      if (!first) ss << "|";
      ss << gap << ":" << count;
      first = false;
    }
    return ss.str();
  };

  if (format == "csv") {
    auto& os = out.open("bench.csv");
    write_csv_row(os, {"root_seed", "n", "m", "instances", "equality_rate",
                       "gap_histogram", "greedy_mean_us", "brute_mean_us"});
    for (const auto& row : table) {
      write_csv_row(os, {std::to_string(seed), std::to_string(row.n), std::to_string(row.m),
                         std::to_string(instances),
                         row.has_brute ? format_value(row.equality_rate) : "",
                         histogram_str(row.gap_histogram),
                         format_value(row.greedy_mean_us),
                         row.has_brute ? format_value(row.brute_mean_us) : ""});
    }
    return kExitOk;
  }

  auto& os = out.open("bench.txt");
  os << "root_seed: " << seed << "  instances per cell: " << instances << "\n";
  os << "   n    m  equal_rate  gap_histogram      greedy_us     brute_us\n";
  for (const auto& row : table) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%4zu %4zu  %10s  %-16s %12.2f %12s\n", row.n, row.m,
                  row.has_brute ? format_value(row.equality_rate).c_str() : "-",
                  histogram_str(row.gap_histogram).c_str(), row.greedy_mean_us,
                  row.has_brute ? format_value(row.brute_mean_us).c_str() : "-");
    os << buf;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PSR-aware transmission-order scheduling and desk-scale simulation"};
  app.require_subcommand(1);

  Log log;
  bool quiet = false, verbose = false;
  app.add_flag("--quiet", quiet, "suppress progress output");
  app.add_flag("--verbose", verbose, "chatty progress output");

  // Shared flag storage; each subcommand binds the subset it supports.
  std::string scenario_path, solver = "both", format, policy = "baseline";
  std::optional<std::string> out_dir;
  std::size_t seeds = 5, placements = 20, instances = 100, brute_cap = 12;
  std::optional<double> trta_flag, sinr_th_flag, duration_flag, warmup_flag;
  std::optional<std::size_t> window_flag;
  std::optional<std::uint64_t> seed_flag;
  std::vector<double> trta_list;
  std::vector<std::string> policy_list, n_items{"4..8"}, m_items{"2", "4"};
  std::uint64_t bench_seed = 1;

  auto add_common = [&](CLI::App* sub, const char* default_format) {
    sub->add_option("--out", out_dir, "write outputs into this directory");
    sub->add_option("--format", format, "output format")->default_val(default_format);
    sub->add_option("--seed", seed_flag, "override the scenario root seed");
  };
  auto overrides = [&]() {
    ScenarioOverrides o;
    o.t_rta_ms = trta_flag;
    o.sinr_threshold_db = sinr_th_flag;
    o.sim_duration_s = duration_flag;
    o.warmup_duration_s = warmup_flag;
    o.classification_window = window_flag;
    o.seed = seed_flag;
    return o;
  };

  auto* solve = app.add_subcommand("solve", "compute a transmission order");
  solve->add_option("scenario", scenario_path, "scenario file")->required();
  solve->add_option("--solver", solver, "greedy, brute, or both")->default_val("both");
  solve->add_option("--brute-cap", brute_cap, "largest N the exact solver accepts");
  add_common(solve, "text");

  auto* classify = app.add_subcommand("classify", "favorability matrix and SINR table");
  classify->add_option("scenario", scenario_path, "scenario file")->required();
  classify->add_option("--sinr-threshold", sinr_th_flag, "override the favorability threshold, dB");
  classify->add_option("--window", window_flag, "measurement window depth");
  add_common(classify, "csv");

  auto* simulate = app.add_subcommand("simulate", "seeded comparative simulation");
  simulate->add_option("scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--policy", policy, "baseline, greedy, or brute")->default_val("baseline");
  simulate->add_option("--seeds", seeds, "number of seeded runs")->default_val(5);
  simulate->add_option("--trta", trta_flag, "override the RTA packet period, ms");
  simulate->add_option("--duration-s", duration_flag, "override the simulated span, s");
  simulate->add_option("--warmup-s", warmup_flag, "override the warmup span, s");
  simulate->add_option("--brute-cap", brute_cap, "largest N the exact solver accepts");
  add_common(simulate, "csv");

  auto* sweep = app.add_subcommand("sweep", "traffic-period x placement x policy grid");
  sweep->add_option("scenario", scenario_path, "scenario file")->required();
  sweep->add_option("--trta", trta_list, "traffic periods to sweep, ms")->delimiter(',');
  sweep->add_option("--placements", placements, "number of station placements")->default_val(20);
  sweep->add_option("--policies", policy_list, "subset of baseline,greedy,brute")->delimiter(',');
  sweep->add_option("--seeds", seeds, "seeded runs per cell")->default_val(5);
  sweep->add_option("--duration-s", duration_flag, "override the simulated span, s");
  sweep->add_option("--warmup-s", warmup_flag, "override the warmup span, s");
  sweep->add_option("--brute-cap", brute_cap, "largest N the exact solver accepts");
  add_common(sweep, "csv");

  auto* bench = app.add_subcommand("bench", "solver quality and runtime table");
  bench->add_option("--n", n_items, "station counts, e.g. 4,6 or 4..8")->delimiter(',');
  bench->add_option("--m", m_items, "row counts, e.g. 2,4")->delimiter(',');
  bench->add_option("--instances", instances, "instances per cell")->default_val(100);
  bench->add_option("--seed", bench_seed, "instance generator seed");
  bench->add_option("--brute-cap", brute_cap, "largest N the exact solver accepts");
  bench->add_option("--out", out_dir, "write outputs into this directory");
  bench->add_option("--format", format, "text or csv")->default_val("text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  log.level = quiet ? 0 : (verbose ? 2 : 1);
  Output out(out_dir);

  try {
    if (solve->parsed())
      return cmd_solve(scenario_path, solver, format, brute_cap, overrides(), out, log);
    if (classify->parsed())
      return cmd_classify(scenario_path, format, window_flag, overrides(), out, log);
    if (simulate->parsed())
      return cmd_simulate(scenario_path, policy, seeds, format, brute_cap, overrides(),
                          out, log);
    if (sweep->parsed())
      return cmd_sweep(scenario_path, trta_list, placements, policy_list, seeds,
                       brute_cap, overrides(), out, log);
    if (bench->parsed())
      return cmd_bench(n_items, m_items, instances, bench_seed, brute_cap, format, out,
                       log);
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
