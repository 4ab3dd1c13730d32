// Command-line front end: solve one instance, benchmark a directory,
// compute exact optima for small instances, or generate test fixtures.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrcpsp/bench.hpp"
#include "mrcpsp/eda.hpp"
#include "mrcpsp/project.hpp"
#include "mrcpsp/psplib.hpp"
#include "mrcpsp/schedule.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

mrcpsp::ProjectInstance load_instance(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open instance file: " + file.string());
  auto inst = mrcpsp::parse_instance(in);
  inst.name = file.stem().string();
  const auto verdict = mrcpsp::validate_instance(inst);
  if (!verdict.empty())
    throw std::runtime_error(file.string() + " is not a valid instance: " + verdict.front());
  return inst;
}

struct SolveFlags {
  std::string file;
  std::int64_t schedules = 5000;
  double time_limit = 0.0;
  int population = 100;
  double elite_frac = 0.2;
  double alpha = 0.5;
  double rw = 0.5;
  std::uint64_t seed = 1;
  bool no_dirw = false;
  bool no_mdj = false;
  bool json = false;
};

void add_solver_options(CLI::App& cmd, SolveFlags& flags) {
  cmd.add_option("--schedules", flags.schedules, "stop after this many generated schedules")
      ->capture_default_str();
  cmd.add_option("--time-limit", flags.time_limit, "stop after this many seconds (0 = off)")
      ->capture_default_str();
  cmd.add_option("--pop", flags.population, "population size")->capture_default_str();
  cmd.add_option("--elite-frac", flags.elite_frac, "fraction of the population kept as elite")
      ->capture_default_str();
  cmd.add_option("--alpha", flags.alpha, "learning speed of the model update")
      ->capture_default_str();
  cmd.add_option("--rw", flags.rw, "acceptance rate of the random-walk local search")
      ->capture_default_str();
  cmd.add_option("--seed", flags.seed, "random seed")->capture_default_str();
  cmd.add_flag("--no-dirw", flags.no_dirw, "disable the random-walk local search");
  cmd.add_flag("--no-mdj", flags.no_mdj, "disable double justification");
}

mrcpsp::SolverParams params_from(const SolveFlags& flags) {
  mrcpsp::SolverParams params;
  params.population = flags.population;
  params.elite_count = std::max(1, static_cast<int>(std::lround(flags.elite_frac * flags.population)));
  params.alpha = flags.alpha;
  params.accept_rate = flags.rw;
  params.max_schedules = flags.schedules;
  params.time_limit_seconds = flags.time_limit;
  params.seed = flags.seed;
  params.use_dirw = !flags.no_dirw;
  params.use_mdj = !flags.no_mdj;
  return params;
}

// The JSON record deliberately omits wall-clock time so that identical
// (instance, params, seed) runs emit identical bytes.
ordered_json result_record(const mrcpsp::ProjectInstance& inst, const mrcpsp::SolverParams& params,
                           const mrcpsp::SolveResult& result) {
  ordered_json doc;
  doc["instance"] = inst.name;
  doc["activities"] = inst.real_count;
  doc["params"] = {{"pop", params.population},      {"elite", params.elite_count},
                   {"alpha", params.alpha},         {"rw", params.accept_rate},
                   {"schedules", params.max_schedules}, {"time_limit", params.time_limit_seconds},
                   {"mdj", params.use_mdj},         {"dirw", params.use_dirw},
                   {"seed", params.seed}};
  doc["reduction"] = {
      {"removed_modes", result.reduction.removed_mode_count()},
      {"removed_nonrenewables", result.reduction.removed_redundant_nonrenewables.size()},
      {"rounds", result.reduction.rounds}};
  doc["feasible"] = result.feasible_found;
  doc["fitness"] = result.best_fitness.scalar;
  if (result.feasible_found) {
    doc["makespan"] = result.best_schedule.makespan;
  } else {
    doc["makespan"] = nullptr;
    doc["nonrenewable_excess"] = result.best_schedule.nonrenewable_excess;
  }
  doc["schedules_generated"] = result.schedules_generated;
  doc["generations"] = result.generations;

  const auto& reduced = result.reduced_instance;
  ordered_json modes = ordered_json::array();
  ordered_json starts = ordered_json::array();
  if (result.feasible_found || !result.best_aml.order.empty()) {
    const auto chosen = mrcpsp::modes_by_activity(result.best_aml, reduced);
    for (int j = 1; j <= reduced.real_count; ++j) {
      modes.push_back(reduced.activities[j].original_mode_ids[chosen[j]]);
      starts.push_back(result.best_schedule.start[j]);
    }
  }
  doc["modes"] = modes;    // original 1-based mode ids, by activity
  doc["starts"] = starts;  // by activity
  return doc;
}

int cmd_solve(const SolveFlags& flags) {
  const auto inst = load_instance(flags.file);
  const auto params = params_from(flags);
  const auto result = mrcpsp::run_solver(inst, params);

  if (flags.json) {
    std::cout << result_record(inst, params, result).dump(2) << '\n';
    return 0;
  }

  std::cout << "instance " << inst.name << ": " << inst.real_count << " real activities, R="
            << inst.renewable_count() << " N=" << inst.nonrenewable_count() << '\n';
  std::cout << "reduction: removed " << result.reduction.removed_mode_count() << " modes ("
            << result.reduction.removed_nonexecutable.size() << " non-executable, "
            << result.reduction.removed_inefficient.size() << " inefficient), "
            << result.reduction.removed_redundant_nonrenewables.size()
            << " redundant nonrenewable resources, " << result.reduction.rounds << " rounds\n";
  if (result.feasible_found) {
    std::cout << "best makespan: " << result.best_schedule.makespan << " (feasible)\n";
    const auto& reduced = result.reduced_instance;
    const auto chosen = mrcpsp::modes_by_activity(result.best_aml, reduced);
    std::cout << "modes:";
    for (int j = 1; j <= reduced.real_count; ++j)
      std::cout << ' ' << j << ':' << reduced.activities[j].original_mode_ids[chosen[j]];
    std::cout << "\nstarts:";
    for (int j = 1; j <= reduced.real_count; ++j)
      std::cout << ' ' << result.best_schedule.start[j];
    std::cout << '\n';
  } else {
    std::cout << "no feasible solution found (best overuse "
              << result.best_schedule.nonrenewable_excess << ")\n";
  }
  std::cout << "schedules: " << result.schedules_generated
            << ", generations: " << result.generations << ", seed: " << result.seed << '\n';
  std::cout << std::fixed << std::setprecision(2) << "wall: " << result.wall_seconds << " s\n";
  return 0;
}

int cmd_bench(const SolveFlags& flags, const std::string& dir, const std::string& bounds,
              bool bounds_heuristic, const std::string& seeds_arg, int workers,
              const std::string& out, const std::string& set_prefix) {
  mrcpsp::BenchmarkConfig config;
  config.instance_dir = dir;
  if (!bounds.empty()) config.bounds_file = bounds;
  config.bounds_are_optimal = !bounds_heuristic;
  config.set_prefix = set_prefix;
  config.params = params_from(flags);
  config.workers = workers;
  if (!out.empty()) config.out_csv = out;

  config.seeds.clear();
  std::istringstream seeds_in(seeds_arg);
  for (std::string tok; std::getline(seeds_in, tok, ',');)
    if (!tok.empty()) config.seeds.push_back(std::stoull(tok));
  if (config.seeds.empty()) config.seeds.push_back(1);

  const auto report = mrcpsp::run_benchmark(config);

  auto pct = [](std::optional<double> v) {
    if (!v) return std::string("n/a");
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << *v;
    return s.str();
  };
  std::cout << "instances: " << report.instance_count << " (" << report.per_run.size()
            << " runs, " << report.failures.size() << " failures, " << report.unbounded_count
            << " without bounds)\n";
  std::cout << "feasible rate: " << pct(report.feasible_rate) << " %\n";
  std::cout << "optimal rate:  " << pct(report.optimal_rate) << " %\n";
  std::cout << "dev best-of-runs: " << pct(report.ard_best) << " %\n";
  std::cout << "dev mean-of-runs: " << pct(report.ard_mean) << " %\n";
  if (config.params.time_limit_seconds > 0.0)
    std::cout << "note: wall-clock limited runs are not comparable across machines\n";
  for (const auto& failure : report.failures) std::cout << "failure: " << failure << '\n';
  if (config.out_csv) std::cout << "results written to " << config.out_csv->string() << '\n';
  return 0;
}

int cmd_oracle(const std::string& file) {
  const auto inst = load_instance(file);
  const auto optimum = mrcpsp::brute_force_optimum(inst);
  if (optimum)
    std::cout << "optimum " << *optimum << '\n';
  else
    std::cout << "infeasible\n";
  return 0;
}

int cmd_gen_tiny(std::uint64_t seed, int count, int min_acts, int max_acts, const std::string& out,
                 bool with_bounds) {
  fs::create_directories(out);
  std::ostringstream bounds;
  for (int i = 0; i < count; ++i) {
    auto inst = mrcpsp::generate_tiny_instance(seed + static_cast<std::uint64_t>(i), min_acts,
                                               max_acts);
    inst.name = "tiny" + std::to_string(i + 1) + "_1";
    const fs::path file = fs::path(out) / (inst.name + ".mm");
    std::ofstream fout(file);
    if (!fout) throw std::runtime_error("cannot write " + file.string());
    fout << mrcpsp::write_instance(inst);
    if (with_bounds) {
      const auto optimum = mrcpsp::brute_force_optimum(inst);
      if (optimum && *optimum > 0) bounds << (i + 1) << " 1 " << *optimum << '\n';
    }
  }
  if (with_bounds) {
    const fs::path file = fs::path(out) / "bounds.txt";
    std::ofstream fout(file);
    fout << "param instance makespan\n" << bounds.str();
    std::cout << "bounds written to " << file.string() << '\n';
  }
  std::cout << count << " instances written to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-mode resource-constrained project scheduling solver"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "solve one instance file");
  solve->add_option("file", solve_flags.file, "PSPLIB .mm instance file")->required();
  add_solver_options(*solve, solve_flags);
  solve->add_flag("--json", solve_flags.json, "emit a deterministic JSON result record");

  SolveFlags bench_flags;
  std::string bench_dir, bench_bounds, bench_seeds = "1", bench_out, bench_prefix;
  bool bench_heuristic = false;
  int bench_workers = 1;
  auto* bench = app.add_subcommand("bench", "run the solver over a directory of instances");
  bench->add_option("dir", bench_dir, "directory of .mm files")->required();
  add_solver_options(*bench, bench_flags);
  bench->add_option("--bounds", bench_bounds, "best-known makespan table");
  bench->add_flag("--bounds-heuristic", bench_heuristic,
                  "bounds are heuristic, not optimal: no optimal rate");
  bench->add_option("--seeds", bench_seeds, "comma-separated seeds, one run each")
      ->capture_default_str();
  bench->add_option("--workers", bench_workers, "concurrent solver runs")->capture_default_str();
  bench->add_option("--out", bench_out, "write per-run results CSV here");
  bench->add_option("--set-prefix", bench_prefix,
                    "filename prefix before <param>_<number> (default: directory name)");

  std::string oracle_file;
  auto* oracle = app.add_subcommand("oracle", "exact optimum of a small instance");
  oracle->add_option("file", oracle_file, "PSPLIB .mm instance file (at most 7 real activities)")
      ->required();

  std::uint64_t gen_seed = 1;
  int gen_count = 10, gen_min = 4, gen_max = 6;
  std::string gen_out = "tiny";
  bool gen_bounds = false;
  auto* gen = app.add_subcommand("gen-tiny", "generate small random instance fixtures");
  gen->add_option("--seed", gen_seed, "seed of the first instance")->capture_default_str();
  gen->add_option("--count", gen_count, "number of instances")->capture_default_str();
  gen->add_option("--min-acts", gen_min, "minimum real activities")->capture_default_str();
  gen->add_option("--max-acts", gen_max, "maximum real activities")->capture_default_str();
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();
  gen->add_flag("--bounds", gen_bounds, "also write exact optima as a bounds table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return cmd_solve(solve_flags);
    if (bench->parsed())
      return cmd_bench(bench_flags, bench_dir, bench_bounds, bench_heuristic, bench_seeds,
                       bench_workers, bench_out, bench_prefix);
    if (oracle->parsed()) return cmd_oracle(oracle_file);
    if (gen->parsed())
      return cmd_gen_tiny(gen_seed, gen_count, gen_min, gen_max, gen_out, gen_bounds);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
