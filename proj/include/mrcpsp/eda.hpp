#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrcpsp/dirw.hpp"
#include "mrcpsp/project.hpp"
#include "mrcpsp/rng.hpp"
#include "mrcpsp/schedule.hpp"

namespace mrcpsp {

// Position-by-activity and activity-by-mode probability matrices the sampler
// draws from. act[i][j-1] is the probability that real activity j occupies
// list position i; mode[j-1][m] the probability that activity j runs in its
// m-th surviving mode. Every row sums to one.
struct ProbabilityModel {
  std::vector<std::vector<double>> act;
  std::vector<std::vector<double>> mode;
  int generation = 0;
};

struct SolverParams {
  int population = 100;
  int elite_count = 20;
  double alpha = 0.5;           // learning speed of the incremental update
  double accept_rate = 0.5;     // per-activity gate of the random-walk search
  std::int64_t max_schedules = 5000;  // 0 = no schedule cap (needs a time limit)
  double time_limit_seconds = 0.0;    // 0 = no time limit
  std::uint64_t seed = 1;
  bool use_mdj = true;
  bool use_dirw = true;
};

struct BudgetZeroError : std::runtime_error {
  explicit BudgetZeroError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SolveResult {
  ActivityModeList best_aml;          // on the reduced instance
  Schedule best_schedule;
  FitnessValue best_fitness;
  bool feasible_found = false;
  std::int64_t schedules_generated = 0;
  int generations = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::vector<double> best_history;   // incumbent fitness after each generation
  ProjectInstance reduced_instance;
  ReductionReport reduction;
};

inline ProbabilityModel init_model(const ProjectInstance& inst) {
  ProbabilityModel model;
  const int reals = inst.real_count;
  model.act.assign(reals, std::vector<double>(reals, reals > 0 ? 1.0 / reals : 0.0));
  model.mode.resize(reals);
  for (int j = 1; j <= reals; ++j) {
    const std::size_t count = inst.activities[j].modes.size();
    model.mode[j - 1].assign(count, 1.0 / static_cast<double>(count));
  }
  model.generation = 0;
  return model;
}

// Draws one precedence-feasible list position by position: at each position
// the unplaced activities whose real predecessors are all placed form the
// eligible set, and one is chosen with probability proportional to its entry
// in that position's row (uniformly when the row mass on the set is zero).
// Modes are then drawn independently per activity from their rows.
inline ActivityModeList sample_individual(const ProbabilityModel& model,
                                          const ProjectInstance& inst, Rng& rng) {
  const int reals = inst.real_count;
  ActivityModeList aml;
  aml.order.reserve(reals);
  aml.modes.resize(reals);

  std::vector<int> open_preds(reals + 1, 0);
  for (const auto& [from, to] : inst.precedence)
    if (from >= 1 && from <= reals && to >= 1 && to <= reals) ++open_preds[to];
  std::vector<int> eligible;
  for (int j = 1; j <= reals; ++j)
    if (open_preds[j] == 0) eligible.push_back(j);

  for (int position = 0; position < reals; ++position) {
    if (eligible.empty())
      throw std::logic_error("no eligible activity at position " + std::to_string(position + 1) +
                             "; precedence graph is inconsistent");
    const auto& row = model.act[position];
    double mass = 0.0;
    for (int j : eligible) mass += row[j - 1];

    int chosen = eligible.front();
    if (mass <= std::numeric_limits<double>::min()) {
      chosen = eligible[rng.uniform_int(0, static_cast<int>(eligible.size()) - 1)];
    } else {
      const double draw = rng.uniform01() * mass;
      double cumulative = 0.0;
      for (int j : eligible) {
        cumulative += row[j - 1];
        chosen = j;
        if (draw < cumulative) break;
      }
    }
    aml.order.push_back(chosen);
    eligible.erase(std::find(eligible.begin(), eligible.end(), chosen));
    for (int succ : inst.activities[chosen].successors) {
      if (succ > reals) continue;
      if (--open_preds[succ] == 0)
        eligible.insert(std::upper_bound(eligible.begin(), eligible.end(), succ), succ);
    }
  }

  for (int i = 0; i < reals; ++i) {
    const int j = aml.order[i];
    const auto& row = model.mode[j - 1];
    double mass = 0.0;
    for (double p : row) mass += p;
    int chosen = 0;
    if (mass <= std::numeric_limits<double>::min()) {
      chosen = rng.uniform_int(0, static_cast<int>(row.size()) - 1);
    } else {
      const double draw = rng.uniform01() * mass;
      double cumulative = 0.0;
      for (std::size_t m = 0; m < row.size(); ++m) {
        cumulative += row[m];
        chosen = static_cast<int>(m);
        if (draw < cumulative) break;
      }
    }
    aml.modes[i] = chosen;
  }
  return aml;
}

// Indices of the elite_count best individuals by fitness scalar, ties kept
// in population order.
inline std::vector<std::size_t> rank_select(const std::vector<FitnessValue>& fitness,
                                            std::size_t elite_count) {
  if (elite_count > fitness.size())
    throw std::invalid_argument("elite count exceeds population size");
  std::vector<std::size_t> index(fitness.size());
  std::iota(index.begin(), index.end(), 0);
  std::stable_sort(index.begin(), index.end(), [&](std::size_t a, std::size_t b) {
    return fitness[a].scalar < fitness[b].scalar;
  });
  index.resize(elite_count);
  return index;
}

// Incremental learning step: each row moves from its current values toward
// the elite's empirical frequencies at rate alpha. Row sums stay at one.
inline ProbabilityModel update_model(const ProbabilityModel& model,
                                     const std::vector<ActivityModeList>& elite, double alpha) {
  if (elite.empty()) throw std::invalid_argument("elite set must be non-empty");
  ProbabilityModel next = model;
  const double share = alpha / static_cast<double>(elite.size());
  const std::size_t reals = model.act.size();

  for (std::size_t i = 0; i < reals; ++i)
    for (std::size_t j = 0; j < reals; ++j) next.act[i][j] *= (1.0 - alpha);
  for (auto& row : next.mode)
    for (double& p : row) p *= (1.0 - alpha);

  for (const auto& aml : elite) {
    for (std::size_t i = 0; i < aml.order.size(); ++i) {
      const int j = aml.order[i];
      next.act[i][j - 1] += share;
      next.mode[j - 1][aml.modes[i]] += share;
    }
  }
  next.generation = model.generation + 1;
  return next;
}

namespace detail {

struct Individual {
  ActivityModeList aml;
  Schedule schedule;
  FitnessValue fitness;
};

}  // namespace detail

// Outer loop: sample a population from the model, evaluate by serial
// decoding, justify and random-walk the elite, then pull the model toward
// the reworked elite; repeat until the schedule budget or time limit is hit.
// The best individual ever evaluated is returned. All randomness comes from
// one generator seeded by params.seed.
inline SolveResult run_solver(const ProjectInstance& instance, const SolverParams& params) {
  if (params.population < 1) throw std::invalid_argument("population must be at least 1");
  if (params.elite_count < 1 || params.elite_count > params.population)
    throw std::invalid_argument("elite count must lie in [1, population]");
  if (params.alpha < 0.0 || params.alpha > 1.0)
    throw std::invalid_argument("learning speed must lie in [0, 1]");
  if (params.accept_rate < 0.0 || params.accept_rate > 1.0)
    throw std::invalid_argument("acceptance rate must lie in [0, 1]");
  if (params.max_schedules <= 0 && params.time_limit_seconds <= 0.0)
    throw BudgetZeroError("stopping rule is empty: set a schedule budget or a time limit");

  const auto clock_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  };

  SolveResult result;
  result.seed = params.seed;
  auto [inst, reduction] = reduce_instance(instance);
  result.reduction = std::move(reduction);

  Rng rng(params.seed);
  ProbabilityModel model = init_model(inst);
  ScheduleCounter counter;
  const std::int64_t budget =
      params.max_schedules > 0 ? params.max_schedules : std::numeric_limits<std::int64_t>::max();

  auto stop = [&] {
    if (counter.generated >= budget) return true;
    return params.time_limit_seconds > 0.0 && elapsed() >= params.time_limit_seconds;
  };

  std::optional<detail::Individual> incumbent;
  auto consider = [&](const detail::Individual& candidate) {
    if (!incumbent || candidate.fitness.scalar < incumbent->fitness.scalar)
      incumbent = candidate;
  };

  std::vector<detail::Individual> population;
  population.reserve(params.population);
  bool out_of_budget = false;

  while (!out_of_budget && !stop()) {
    population.clear();
    for (int p = 0; p < params.population; ++p) {
      if (stop()) {
        out_of_budget = true;
        break;
      }
      detail::Individual ind;
      ind.aml = sample_individual(model, inst, rng);
      ind.schedule = decode_forward(ind.aml, inst, counter);
      ind.fitness = fitness_of(ind.schedule, inst);
      consider(ind);
      population.push_back(std::move(ind));
    }
    if (out_of_budget) break;

    std::vector<FitnessValue> fitness(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) fitness[i] = population[i].fitness;
    const auto elite_index =
        rank_select(fitness, static_cast<std::size_t>(params.elite_count));
    std::vector<detail::Individual> elite;
    elite.reserve(elite_index.size());
    for (std::size_t idx : elite_index) elite.push_back(population[idx]);

    if (params.use_mdj) {
      for (auto& member : elite) {
        if (stop()) {
          out_of_budget = true;
          break;
        }
        auto justified = double_justify(member.aml, member.schedule, inst, counter,
                                        budget - counter.generated);
        member.aml = std::move(justified.aml);
        member.schedule = std::move(justified.schedule);
        member.fitness = fitness_of(member.schedule, inst);
        consider(member);
      }
      if (out_of_budget) break;
    }

    if (params.use_dirw) {
      for (auto& member : elite) {
        if (stop()) {
          out_of_budget = true;
          break;
        }
        member.aml = dirw_pass(member.aml, inst, params.accept_rate, rng);
        member.schedule = decode_forward(member.aml, inst, counter);
        member.fitness = fitness_of(member.schedule, inst);
        consider(member);
      }
      if (out_of_budget) break;
    }

    std::vector<ActivityModeList> elite_lists;
    elite_lists.reserve(elite.size());
    for (auto& member : elite) elite_lists.push_back(std::move(member.aml));
    model = update_model(model, elite_lists, params.alpha);

    ++result.generations;
    result.best_history.push_back(incumbent ? incumbent->fitness.scalar : 0.0);
  }

  if (incumbent) {
    result.best_aml = incumbent->aml;
    result.best_schedule = incumbent->schedule;
    result.best_fitness = incumbent->fitness;
    result.feasible_found = incumbent->fitness.feasible;
  }
  result.schedules_generated = counter.generated;
  result.reduced_instance = std::move(inst);
  result.wall_seconds = elapsed();
  return result;
}

}  // namespace mrcpsp
