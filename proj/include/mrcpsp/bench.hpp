#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mrcpsp/eda.hpp"
#include "mrcpsp/project.hpp"
#include "mrcpsp/psplib.hpp"
#include "mrcpsp/schedule.hpp"

namespace mrcpsp {

struct TooLargeError : std::runtime_error {
  explicit TooLargeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingBoundError : std::runtime_error {
  explicit MissingBoundError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyResultSetError : std::runtime_error {
  explicit EmptyResultSetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exhaustive optimum for small instances: every mode assignment within the
// nonrenewable budgets crossed with every precedence-feasible activity
// order, each decoded by the serial scheme. List-ordered serial schedules
// include an optimal one, so the minimum over the cross product is the true
// optimum. Returns nothing when no mode assignment admits a schedule. The
// winning schedule is re-checked by the independent verifier.
inline std::optional<int> brute_force_optimum(const ProjectInstance& inst) {
  if (inst.real_count > 7)
    throw TooLargeError("exhaustive search is limited to 7 real activities, got " +
                        std::to_string(inst.real_count));
  for (int j = 1; j <= inst.real_count; ++j)
    if (inst.activities[j].modes.size() > 3)
      throw TooLargeError("exhaustive search is limited to 3 modes per activity");

  const int reals = inst.real_count;

  // all precedence-feasible permutations
  std::vector<std::vector<int>> orders;
  {
    std::vector<int> open_preds(reals + 1, 0);
    for (const auto& [from, to] : inst.precedence)
      if (from >= 1 && from <= reals && to >= 1 && to <= reals) ++open_preds[to];
    std::vector<int> prefix;
    auto extend = [&](auto&& self) -> void {
      if (static_cast<int>(prefix.size()) == reals) {
        orders.push_back(prefix);
        return;
      }
      for (int j = 1; j <= reals; ++j) {
        if (open_preds[j] != 0) continue;
        if (std::find(prefix.begin(), prefix.end(), j) != prefix.end()) continue;
        prefix.push_back(j);
        for (int succ : inst.activities[j].successors)
          if (succ >= 1 && succ <= reals) --open_preds[succ];
        self(self);
        for (int succ : inst.activities[j].successors)
          if (succ >= 1 && succ <= reals) ++open_preds[succ];
        prefix.pop_back();
      }
    };
    extend(extend);
  }

  std::optional<int> best;
  Schedule best_schedule;
  std::vector<int> best_modes;
  std::vector<int> assignment(reals + 1, 0);
  ScheduleCounter counter;

  auto try_assignment = [&] {
    // skip assignments no schedule can realize
    for (int j = 1; j <= reals; ++j) {
      const Mode& m = inst.activities[j].modes[assignment[j]];
      for (int k = 0; k < inst.renewable_count(); ++k)
        if (m.renewable[k] > inst.renewable_capacity[k]) return;
    }
    for (int l = 0; l < inst.nonrenewable_count(); ++l) {
      long long used = 0;
      for (int j = 1; j <= reals; ++j)
        used += inst.activities[j].modes[assignment[j]].nonrenewable[l];
      if (used > inst.nonrenewable_capacity[l]) return;
    }
    ActivityModeList aml;
    for (const auto& order : orders) {
      aml.order = order;
      aml.modes.resize(order.size());
      for (std::size_t i = 0; i < order.size(); ++i) aml.modes[i] = assignment[order[i]];
      const Schedule sched = decode_forward(aml, inst, counter);
      if (!best || sched.makespan < *best) {
        best = sched.makespan;
        best_schedule = sched;
        best_modes = modes_by_activity(aml, inst);
      }
    }
  };

  auto enumerate = [&](auto&& self, int j) -> void {
    if (j > reals) {
      try_assignment();
      return;
    }
    const int count = static_cast<int>(inst.activities[j].modes.size());
    for (int m = 0; m < count; ++m) {
      assignment[j] = m;
      self(self, j + 1);
    }
  };
  enumerate(enumerate, 1);

  if (best) {
    const auto verdict = verify_schedule(best_schedule, best_modes, inst);
    if (!verdict.empty())
      throw std::logic_error("exhaustive search produced an invalid schedule: " + verdict.front());
  }
  return best;
}

struct InstanceResult {
  std::string name;
  int parameter = 0;  // bounds key; (0, 0) when unknown
  int number = 0;
  bool feasible_found = false;
  int makespan = 0;   // meaningful only when feasible_found
  std::optional<int> best_known;
  std::int64_t schedules = 0;
  std::uint64_t seed = 0;
  double seconds = 0.0;
};

namespace detail {

inline std::optional<int> bound_of(const InstanceResult& r, const BoundsTable& bounds) {
  if (auto b = bounds.lookup(r.parameter, r.number)) return b;
  return r.best_known;
}

}  // namespace detail

// Mean relative deviation of the found makespans from their best-known
// values over the feasible results, as a percentage.
inline double compute_ard(const std::vector<InstanceResult>& results, const BoundsTable& bounds) {
  double total = 0.0;
  int feasible = 0;
  for (const auto& r : results) {
    if (!r.feasible_found) continue;
    const auto bound = detail::bound_of(r, bounds);
    if (!bound) throw MissingBoundError("no best-known value for instance " + r.name);
    total += static_cast<double>(r.makespan - *bound) / static_cast<double>(*bound);
    ++feasible;
  }
  if (feasible == 0) throw EmptyResultSetError("no feasible results to average over");
  return 100.0 * total / static_cast<double>(feasible);
}

struct Rates {
  std::optional<double> optimal_rate;  // absent when no result has a bound
  double feasible_rate = 0.0;
};

inline Rates compute_rates(const std::vector<InstanceResult>& results, const BoundsTable& bounds) {
  Rates rates;
  if (results.empty()) return rates;
  int feasible = 0, bounded = 0, optimal = 0;
  for (const auto& r : results) {
    if (r.feasible_found) ++feasible;
    const auto bound = detail::bound_of(r, bounds);
    if (!bound) continue;
    ++bounded;
    if (r.feasible_found && r.makespan == *bound) ++optimal;
  }
  rates.feasible_rate = 100.0 * feasible / static_cast<double>(results.size());
  if (bounded > 0) rates.optimal_rate = 100.0 * optimal / static_cast<double>(bounded);
  return rates;
}

struct BenchmarkConfig {
  std::filesystem::path instance_dir;
  std::optional<std::filesystem::path> bounds_file;
  bool bounds_are_optimal = true;  // false for heuristic bounds: no optimal rate
  std::string set_prefix;          // filename prefix before "<param>_<number>"; default: dir name
  std::vector<std::uint64_t> seeds{1};
  SolverParams params;
  int workers = 1;
  std::optional<std::filesystem::path> out_csv;
};

struct BenchmarkReport {
  std::vector<InstanceResult> per_run;       // one row per (instance, seed)
  std::vector<InstanceResult> best_of_runs;  // one row per instance
  std::optional<double> ard_best;            // headline: deviation of best-of-runs
  std::optional<double> ard_mean;            // deviation of mean-of-runs makespans
  std::optional<double> optimal_rate;
  double feasible_rate = 0.0;
  int instance_count = 0;
  int unbounded_count = 0;  // instances without a bounds entry
  std::vector<std::string> failures;  // per-instance parse/solve failures
  SolverParams params;
  std::vector<std::uint64_t> seeds;
};

namespace detail {

inline std::pair<int, int> bounds_key_from_stem(const std::string& stem,
                                                const std::string& prefix) {
  if (stem.size() <= prefix.size() || stem.compare(0, prefix.size(), prefix) != 0) return {0, 0};
  const std::string rest = stem.substr(prefix.size());
  const auto underscore = rest.find('_');
  if (underscore == std::string::npos) return {0, 0};
  try {
    std::size_t pos1 = 0, pos2 = 0;
    const int parameter = std::stoi(rest.substr(0, underscore), &pos1);
    const int number = std::stoi(rest.substr(underscore + 1), &pos2);
    if (pos1 != underscore || pos2 != rest.size() - underscore - 1) return {0, 0};
    return {parameter, number};
  } catch (const std::exception&) {
    return {0, 0};
  }
}

inline std::string csv_escape_free(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == ',' || c == '\n') c = '_';
  return out;
}

}  // namespace detail

inline void write_results_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "name,parameter,number,seed,feasible,makespan,best_known,schedules,seconds\n";
  for (const auto& r : report.per_run) {
    out << detail::csv_escape_free(r.name) << ',' << r.parameter << ',' << r.number << ','
        << r.seed << ',' << (r.feasible_found ? 1 : 0) << ',';
    if (r.feasible_found) out << r.makespan;
    out << ',';
    if (r.best_known) out << *r.best_known;
    out << ',' << r.schedules << ',' << std::fixed << std::setprecision(3) << r.seconds << '\n';
    out.unsetf(std::ios::fixed);
  }
  auto pct = [](std::optional<double> v) {
    if (!v) return std::string("n/a");
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << *v;
    return s.str();
  };
  out << "# instances=" << report.instance_count << " runs=" << report.per_run.size()
      << " parse_failures=" << report.failures.size() << " unbounded=" << report.unbounded_count
      << '\n';
  out << "# feasible_rate=" << pct(report.feasible_rate) << '\n';
  out << "# optimal_rate=" << pct(report.optimal_rate) << '\n';
  out << "# ard_best=" << pct(report.ard_best) << '\n';
  out << "# ard_mean=" << pct(report.ard_mean) << '\n';
  out << "# pop=" << report.params.population << " elite=" << report.params.elite_count
      << " alpha=" << report.params.alpha << " rw=" << report.params.accept_rate
      << " schedules=" << report.params.max_schedules
      << " time_limit=" << report.params.time_limit_seconds
      << " mdj=" << (report.params.use_mdj ? 1 : 0) << " dirw=" << (report.params.use_dirw ? 1 : 0)
      << '\n';
  out << "# seeds=";
  for (std::size_t i = 0; i < report.seeds.size(); ++i)
    out << (i ? "," : "") << report.seeds[i];
  out << '\n';
}

// Reads back the per-run rows of a results file (footer lines are skipped).
inline std::vector<InstanceResult> read_results_csv(std::istream& in) {
  std::vector<InstanceResult> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      first = false;  // header
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() < 9) continue;
    InstanceResult r;
    r.name = cells[0];
    r.parameter = std::stoi(cells[1]);
    r.number = std::stoi(cells[2]);
    r.seed = std::stoull(cells[3]);
    r.feasible_found = cells[4] == "1";
    if (!cells[5].empty()) r.makespan = std::stoi(cells[5]);
    if (!cells[6].empty()) r.best_known = std::stoi(cells[6]);
    r.schedules = std::stoll(cells[7]);
    r.seconds = std::stod(cells[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// Runs the solver over every .mm file in a directory, once per seed, and
// aggregates deviation and rate statistics. Instance-level failures are
// recorded and skipped; configuration problems throw.
inline BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(config.instance_dir))
    throw std::runtime_error("instance directory does not exist: " + config.instance_dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(config.instance_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".mm") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("no .mm instance files in " + config.instance_dir.string());
  if (config.seeds.empty()) throw std::runtime_error("at least one seed is required");
  if (config.workers < 1) throw std::runtime_error("worker count must be at least 1");

  BoundsTable bounds;
  if (config.bounds_file) {
    std::ifstream in(*config.bounds_file);
    if (!in) throw std::runtime_error("cannot open bounds file: " + config.bounds_file->string());
    bounds = parse_bounds_table(in);
  }
  const std::string prefix =
      config.set_prefix.empty() ? config.instance_dir.filename().string() : config.set_prefix;

  BenchmarkReport report;
  report.params = config.params;
  report.seeds = config.seeds;

  struct Task {
    std::size_t file_index;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  std::vector<ProjectInstance> instances(files.size());
  std::vector<bool> parsed(files.size(), false);
  for (std::size_t f = 0; f < files.size(); ++f) {
    std::ifstream in(files[f]);
    if (!in) {
      report.failures.push_back(files[f].filename().string() + ": cannot open");
      continue;
    }
    try {
      instances[f] = parse_instance(in);
      instances[f].name = files[f].stem().string();
      const auto verdict = validate_instance(instances[f]);
      if (!verdict.empty()) {
        report.failures.push_back(files[f].filename().string() + ": " + verdict.front());
        continue;
      }
      parsed[f] = true;
    } catch (const ParseError& err) {
      report.failures.push_back(files[f].filename().string() + ": " + err.what());
      continue;
    }
    for (std::uint64_t seed : config.seeds) tasks.push_back({f, seed});
  }

  std::vector<std::optional<InstanceResult>> outcomes(tasks.size());
  std::vector<std::string> task_failures(tasks.size());
  std::mutex cursor_mutex;
  std::size_t cursor = 0;

  auto worker = [&] {
    for (;;) {
      std::size_t mine;
      {
        std::lock_guard<std::mutex> lock(cursor_mutex);
        if (cursor >= tasks.size()) return;
        mine = cursor++;
      }
      const Task& task = tasks[mine];
      const ProjectInstance& inst = instances[task.file_index];
      SolverParams params = config.params;
      params.seed = task.seed;
      InstanceResult row;
      row.name = inst.name;
      const auto key = detail::bounds_key_from_stem(inst.name, prefix);
      row.parameter = key.first;
      row.number = key.second;
      row.best_known = bounds.lookup(key.first, key.second);
      row.seed = task.seed;
      try {
        const SolveResult solved = run_solver(inst, params);
        row.feasible_found = solved.feasible_found;
        row.makespan = solved.feasible_found ? solved.best_schedule.makespan : 0;
        row.schedules = solved.schedules_generated;
        row.seconds = solved.wall_seconds;
        outcomes[mine] = std::move(row);
      } catch (const std::exception& err) {
        task_failures[mine] = inst.name + ": " + err.what();
      }
    }
  };

  if (config.workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < config.workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (outcomes[i]) report.per_run.push_back(*outcomes[i]);
    else if (!task_failures[i].empty()) report.failures.push_back(task_failures[i]);
  }
  std::sort(report.per_run.begin(), report.per_run.end(),
            [](const InstanceResult& a, const InstanceResult& b) {
              if (a.name != b.name) return a.name < b.name;
              return a.seed < b.seed;
            });

  // fold runs into per-instance rows: the best run, plus the mean makespan
  // of feasible runs for the secondary deviation column
  std::vector<double> mean_makespans;
  for (std::size_t i = 0; i < report.per_run.size();) {
    std::size_t end = i;
    while (end < report.per_run.size() && report.per_run[end].name == report.per_run[i].name) ++end;
    InstanceResult best = report.per_run[i];
    double feasible_total = 0.0;
    int feasible_runs = 0;
    for (std::size_t r = i; r < end; ++r) {
      const auto& run = report.per_run[r];
      if (run.feasible_found) {
        feasible_total += run.makespan;
        ++feasible_runs;
        if (!best.feasible_found || run.makespan < best.makespan) best = run;
      }
    }
    report.best_of_runs.push_back(best);
    mean_makespans.push_back(feasible_runs > 0 ? feasible_total / feasible_runs : 0.0);
    i = end;
  }
  report.instance_count = static_cast<int>(report.best_of_runs.size());

  for (const auto& r : report.best_of_runs)
    if (!detail::bound_of(r, bounds)) ++report.unbounded_count;

  const Rates rates = compute_rates(report.best_of_runs, bounds);
  report.feasible_rate = rates.feasible_rate;
  if (config.bounds_are_optimal) report.optimal_rate = rates.optimal_rate;

  // deviations over instances that are feasible and have a bound
  double best_total = 0.0, mean_total = 0.0;
  int counted = 0;
  for (std::size_t i = 0; i < report.best_of_runs.size(); ++i) {
    const auto& r = report.best_of_runs[i];
    const auto bound = detail::bound_of(r, bounds);
    if (!r.feasible_found || !bound) continue;
    best_total += static_cast<double>(r.makespan - *bound) / *bound;
    mean_total += (mean_makespans[i] - *bound) / *bound;
    ++counted;
  }
  if (counted > 0) {
    report.ard_best = 100.0 * best_total / counted;
    report.ard_mean = 100.0 * mean_total / counted;
  }

  if (config.out_csv) {
    std::ofstream out(*config.out_csv);
    if (!out) throw std::runtime_error("cannot write results file: " + config.out_csv->string());
    write_results_csv(out, report);
  }
  return report;
}

}  // namespace mrcpsp
