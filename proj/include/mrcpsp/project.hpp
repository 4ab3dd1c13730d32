#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mrcpsp/rng.hpp"

namespace mrcpsp {

// One execution mode of an activity: a duration plus per-resource demands.
// Renewable demand is held for every period the activity runs; nonrenewable
// consumption is charged once against the whole-project budget.
struct Mode {
  int duration = 0;
  std::vector<int> renewable;
  std::vector<int> nonrenewable;

  bool operator==(const Mode&) const = default;
};

struct Activity {
  std::vector<Mode> modes;
  std::vector<int> original_mode_ids;  // 1-based ids as read, before reduction
  std::vector<int> predecessors;       // derived from the precedence pairs
  std::vector<int> successors;
};

// Project description. Activities are numbered 0..J+1 where 0 and J+1 are
// zero-duration dummies marking project start and end. Numbering is
// topological: every precedence pair goes from a lower to a higher id.
struct ProjectInstance {
  std::string name;
  int real_count = 0;                          // activities excluding dummies
  std::vector<Activity> activities;            // size real_count + 2
  std::vector<int> renewable_capacity;         // per-period limits
  std::vector<int> nonrenewable_capacity;      // whole-project budgets
  std::vector<std::pair<int, int>> precedence; // direct arcs (pred, succ)
  std::vector<int> original_nonrenewable_ids;  // 1-based ids before reduction
  int horizon_hint = 0;                        // as read from file; solver ignores it

  int total_count() const { return real_count + 2; }
  int end_id() const { return real_count + 1; }
  int renewable_count() const { return static_cast<int>(renewable_capacity.size()); }
  int nonrenewable_count() const { return static_cast<int>(nonrenewable_capacity.size()); }
};

// Some activity ends up with an empty mode set during reduction: no mode
// assignment can satisfy the nonrenewable budgets through that activity.
struct InfeasibleInstanceError : std::runtime_error {
  explicit InfeasibleInstanceError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void rebuild_adjacency(ProjectInstance& inst) {
  for (auto& a : inst.activities) {
    a.predecessors.clear();
    a.successors.clear();
  }
  const int n = static_cast<int>(inst.activities.size());
  for (const auto& [from, to] : inst.precedence) {
    if (from < 0 || from >= n || to < 0 || to >= n) continue;
    inst.activities[from].successors.push_back(to);
    inst.activities[to].predecessors.push_back(from);
  }
  for (auto& a : inst.activities) {
    std::sort(a.predecessors.begin(), a.predecessors.end());
    std::sort(a.successors.begin(), a.successors.end());
  }
}

// Upper bound on the makespan of any list-generated schedule: every activity
// serialized at its longest mode.
inline int makespan_upper_bound(const ProjectInstance& inst) {
  int total = 0;
  for (int j = 1; j <= inst.real_count; ++j) {
    int longest = 0;
    for (const auto& m : inst.activities[j].modes) longest = std::max(longest, m.duration);
    total += longest;
  }
  return total;
}

// Content comparison ignoring names and bookkeeping id maps; used by the
// file round-trip and reduction-idempotence checks.
inline bool structurally_equal(const ProjectInstance& a, const ProjectInstance& b) {
  if (a.real_count != b.real_count) return false;
  if (a.renewable_capacity != b.renewable_capacity) return false;
  if (a.nonrenewable_capacity != b.nonrenewable_capacity) return false;
  if (a.horizon_hint != b.horizon_hint) return false;
  auto pa = a.precedence, pb = b.precedence;
  std::sort(pa.begin(), pa.end());
  std::sort(pb.begin(), pb.end());
  if (pa != pb) return false;
  for (int j = 0; j < a.total_count(); ++j) {
    if (a.activities[j].modes != b.activities[j].modes) return false;
  }
  return true;
}

// Checks every structural invariant and returns one message per violation;
// empty result means the instance is well formed. Never throws.
inline std::vector<std::string> validate_instance(const ProjectInstance& inst) {
  std::vector<std::string> verdict;
  const int n = inst.total_count();
  if (static_cast<int>(inst.activities.size()) != n) {
    verdict.push_back("activity vector size does not match real_count + 2");
    return verdict;  // indexing below would be unsafe
  }
  if (inst.real_count < 0) verdict.push_back("negative real activity count");

  const int renew = inst.renewable_count();
  const int nonren = inst.nonrenewable_count();
  for (int k = 0; k < renew; ++k)
    if (inst.renewable_capacity[k] < 0)
      verdict.push_back("negative renewable capacity " + std::to_string(k + 1));
  for (int l = 0; l < nonren; ++l)
    if (inst.nonrenewable_capacity[l] < 0)
      verdict.push_back("negative nonrenewable capacity " + std::to_string(l + 1));

  for (const auto& [from, to] : inst.precedence) {
    if (from < 0 || from >= n || to < 0 || to >= n) {
      verdict.push_back("precedence pair (" + std::to_string(from) + ", " + std::to_string(to) +
                        ") references an unknown activity");
    } else if (from >= to) {
      verdict.push_back("non-topological numbering: pair (" + std::to_string(from) + ", " +
                        std::to_string(to) + ")");
    }
  }
  {
    auto pairs = inst.precedence;
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
      verdict.push_back("duplicate precedence pair");
  }

  // Cycle check on the raw arc set, independent of the numbering rule.
  {
    std::vector<std::vector<int>> succ(n);
    for (const auto& [from, to] : inst.precedence)
      if (from >= 0 && from < n && to >= 0 && to < n) succ[from].push_back(to);
    std::vector<int> color(n, 0);  // 0 new, 1 on stack, 2 done
    bool cycle = false;
    for (int root = 0; root < n && !cycle; ++root) {
      if (color[root] != 0) continue;
      std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
      color[root] = 1;
      while (!stack.empty() && !cycle) {
        auto& [node, next] = stack.back();
        if (next < succ[node].size()) {
          int child = succ[node][next++];
          if (color[child] == 1) cycle = true;
          else if (color[child] == 0) {
            color[child] = 1;
            stack.emplace_back(child, 0);
          }
        } else {
          color[node] = 2;
          stack.pop_back();
        }
      }
    }
    if (cycle) verdict.push_back("precedence cycle detected");
  }

  auto is_zero_mode = [&](const Mode& m) {
    if (m.duration != 0) return false;
    for (int r : m.renewable) if (r != 0) return false;
    for (int r : m.nonrenewable) if (r != 0) return false;
    return true;
  };

  for (int j = 0; j < n; ++j) {
    const auto& act = inst.activities[j];
    const bool dummy = (j == 0 || j == inst.end_id());
    if (act.modes.empty()) {
      verdict.push_back("activity " + std::to_string(j) + " has no modes");
      continue;
    }
    if (dummy && (act.modes.size() != 1 || !is_zero_mode(act.modes[0])))
      verdict.push_back("dummy activity " + std::to_string(j) +
                        " must have exactly one zero-duration, zero-request mode");
    for (std::size_t mi = 0; mi < act.modes.size(); ++mi) {
      const auto& m = act.modes[mi];
      if (m.duration < 0)
        verdict.push_back("activity " + std::to_string(j) + " mode " + std::to_string(mi + 1) +
                          " has negative duration");
      if (static_cast<int>(m.renewable.size()) != renew ||
          static_cast<int>(m.nonrenewable.size()) != nonren) {
        verdict.push_back("activity " + std::to_string(j) + " mode " + std::to_string(mi + 1) +
                          " has a request vector of the wrong size");
        continue;
      }
      for (int k = 0; k < renew; ++k)
        if (m.renewable[k] < 0)
          verdict.push_back("activity " + std::to_string(j) + " mode " + std::to_string(mi + 1) +
                            " has a negative renewable request");
      for (int l = 0; l < nonren; ++l)
        if (m.nonrenewable[l] < 0)
          verdict.push_back("activity " + std::to_string(j) + " mode " + std::to_string(mi + 1) +
                            " has a negative nonrenewable request");
    }
  }

  // Zero-capacity nonrenewables with positive demand make the overuse
  // measure undefined, so they are rejected up front.
  for (int l = 0; l < nonren; ++l) {
    if (inst.nonrenewable_capacity[l] != 0) continue;
    bool demanded = false;
    for (int j = 1; j <= inst.real_count && !demanded; ++j)
      for (const auto& m : inst.activities[j].modes)
        if (static_cast<int>(m.nonrenewable.size()) > l && m.nonrenewable[l] > 0) {
          demanded = true;
          break;
        }
    if (demanded)
      verdict.push_back("nonrenewable resource " + std::to_string(l + 1) +
                        " has zero capacity but positive requests");
  }

  // dummies must be the unique source and sink
  for (const auto& [from, to] : inst.precedence) {
    if (to == 0) {
      verdict.push_back("dummy start has predecessors");
      break;
    }
  }
  for (const auto& [from, to] : inst.precedence) {
    if (from == inst.end_id()) {
      verdict.push_back("dummy end has successors");
      break;
    }
  }

  return verdict;
}

struct ReductionReport {
  std::vector<std::pair<int, int>> removed_nonexecutable;  // (activity, original mode id)
  std::vector<std::pair<int, int>> removed_inefficient;
  std::vector<int> removed_redundant_nonrenewables;        // original 1-based resource ids
  int rounds = 0;

  std::size_t removed_mode_count() const {
    return removed_nonexecutable.size() + removed_inefficient.size();
  }
};

// Search-space reduction. Repeats three prunes until a full round changes
// nothing:
//   (a) drop modes that cannot appear in any schedule: a renewable request
//       above capacity, or a nonrenewable request that overshoots the budget
//       even when every other activity uses its cheapest mode;
//   (b) drop nonrenewable resources whose budget cannot be exceeded even if
//       every activity picks its most expensive mode;
//   (c) drop modes dominated by another mode of the same activity with equal
//       or shorter duration and no larger request on any surviving resource
//       (exact duplicates keep the lowest mode id).
// The surviving instance admits exactly the same feasible schedules and the
// same optimal makespan. Throws InfeasibleInstanceError when some activity
// loses all modes.
inline std::pair<ProjectInstance, ReductionReport> reduce_instance(const ProjectInstance& input) {
  ProjectInstance inst = input;
  ReductionReport report;

  auto require_nonempty = [&](int j) {
    if (inst.activities[j].modes.empty())
      throw InfeasibleInstanceError("activity " + std::to_string(j) +
                                    " has no executable mode; no feasible mode assignment exists");
  };

  bool changed = true;
  while (changed) {
    changed = false;
    ++report.rounds;
    const int renew = inst.renewable_count();
    const int nonren = inst.nonrenewable_count();

    // (a) non-executable modes
    {
      std::vector<std::vector<int>> min_req(inst.total_count(), std::vector<int>(nonren, 0));
      std::vector<int> total_min(nonren, 0);
      for (int j = 1; j <= inst.real_count; ++j) {
        for (int l = 0; l < nonren; ++l) {
          int lo = inst.activities[j].modes.front().nonrenewable[l];
          for (const auto& m : inst.activities[j].modes) lo = std::min(lo, m.nonrenewable[l]);
          min_req[j][l] = lo;
          total_min[l] += lo;
        }
      }
      for (int j = 1; j <= inst.real_count; ++j) {
        auto& act = inst.activities[j];
        for (std::size_t mi = 0; mi < act.modes.size();) {
          const auto& m = act.modes[mi];
          bool executable = true;
          for (int k = 0; k < renew && executable; ++k)
            if (m.renewable[k] > inst.renewable_capacity[k]) executable = false;
          for (int l = 0; l < nonren && executable; ++l)
            if (m.nonrenewable[l] + (total_min[l] - min_req[j][l]) > inst.nonrenewable_capacity[l])
              executable = false;
          if (executable) {
            ++mi;
          } else {
            report.removed_nonexecutable.emplace_back(j, act.original_mode_ids[mi]);
            act.modes.erase(act.modes.begin() + static_cast<long>(mi));
            act.original_mode_ids.erase(act.original_mode_ids.begin() + static_cast<long>(mi));
            changed = true;
          }
        }
        require_nonempty(j);
      }
    }

    // (b) redundant nonrenewable resources
    for (int l = inst.nonrenewable_count() - 1; l >= 0; --l) {
      long long max_total = 0;
      for (int j = 1; j <= inst.real_count; ++j) {
        int hi = 0;
        for (const auto& m : inst.activities[j].modes) hi = std::max(hi, m.nonrenewable[l]);
        max_total += hi;
      }
      if (max_total <= inst.nonrenewable_capacity[l]) {
        report.removed_redundant_nonrenewables.push_back(inst.original_nonrenewable_ids.empty()
                                                             ? l + 1
                                                             : inst.original_nonrenewable_ids[l]);
        inst.nonrenewable_capacity.erase(inst.nonrenewable_capacity.begin() + l);
        if (!inst.original_nonrenewable_ids.empty())
          inst.original_nonrenewable_ids.erase(inst.original_nonrenewable_ids.begin() + l);
        for (auto& act : inst.activities)
          for (auto& m : act.modes) m.nonrenewable.erase(m.nonrenewable.begin() + l);
        changed = true;
      }
    }

    // (c) inefficient modes
    {
      const int nr = inst.nonrenewable_count();
      auto dominates = [&](const Mode& a, const Mode& b) {
        if (a.duration > b.duration) return false;
        for (int k = 0; k < inst.renewable_count(); ++k)
          if (a.renewable[k] > b.renewable[k]) return false;
        for (int l = 0; l < nr; ++l)
          if (a.nonrenewable[l] > b.nonrenewable[l]) return false;
        return true;
      };
      for (int j = 1; j <= inst.real_count; ++j) {
        auto& act = inst.activities[j];
        const std::size_t count = act.modes.size();
        std::vector<bool> drop(count, false);
        for (std::size_t b = 0; b < count; ++b) {
          for (std::size_t a = 0; a < count && !drop[b]; ++a) {
            if (a == b || !dominates(act.modes[a], act.modes[b])) continue;
            const bool identical = dominates(act.modes[b], act.modes[a]);
            if (!identical || a < b) drop[b] = true;
          }
        }
        for (std::size_t mi = count; mi-- > 0;) {
          if (!drop[mi]) continue;
          report.removed_inefficient.emplace_back(j, act.original_mode_ids[mi]);
          act.modes.erase(act.modes.begin() + static_cast<long>(mi));
          act.original_mode_ids.erase(act.original_mode_ids.begin() + static_cast<long>(mi));
          changed = true;
        }
        require_nonempty(j);
      }
    }
  }

  std::sort(report.removed_redundant_nonrenewables.begin(),
            report.removed_redundant_nonrenewables.end());
  return {std::move(inst), std::move(report)};
}

// Random small instance for oracle-backed tests: topologically numbered DAG,
// two renewable and two nonrenewable resources, durations 1..10, and
// nonrenewable budgets that always admit the all-minimum mode assignment.
// Deterministic in the seed.
inline ProjectInstance generate_tiny_instance(std::uint64_t seed, int min_real, int max_real) {
  if (min_real < 1 || max_real > 7 || min_real > max_real)
    throw std::invalid_argument("tiny instances must have between 1 and 7 real activities");

  Rng rng(seed);
  ProjectInstance inst;
  inst.name = "tiny" + std::to_string(seed);
  inst.real_count = rng.uniform_int(min_real, max_real);
  const int renew = 2, nonren = 2;
  inst.activities.resize(inst.total_count());

  inst.renewable_capacity.resize(renew);
  for (int k = 0; k < renew; ++k) inst.renewable_capacity[k] = rng.uniform_int(3, 8);

  for (int j = 1; j <= inst.real_count; ++j) {
    auto& act = inst.activities[j];
    const int mode_count = rng.uniform_int(1, 3);
    for (int m = 0; m < mode_count; ++m) {
      Mode mode;
      mode.duration = rng.uniform_int(1, 10);
      for (int k = 0; k < renew; ++k)
        mode.renewable.push_back(rng.uniform_int(0, inst.renewable_capacity[k]));
      for (int l = 0; l < nonren; ++l) mode.nonrenewable.push_back(rng.uniform_int(0, 6));
      act.modes.push_back(std::move(mode));
      act.original_mode_ids.push_back(m + 1);
    }
  }
  for (int j : {0, inst.end_id()}) {
    auto& act = inst.activities[j];
    act.modes.push_back(Mode{0, std::vector<int>(renew, 0), std::vector<int>(nonren, 0)});
    act.original_mode_ids.push_back(1);
  }

  for (int to = 2; to <= inst.real_count; ++to)
    for (int from = 1; from < to; ++from)
      if (rng.uniform01() < 0.35) inst.precedence.emplace_back(from, to);

  // dummy arcs for sources and sinks
  std::vector<bool> has_pred(inst.total_count(), false), has_succ(inst.total_count(), false);
  for (const auto& [from, to] : inst.precedence) {
    has_succ[from] = true;
    has_pred[to] = true;
  }
  for (int j = 1; j <= inst.real_count; ++j) {
    if (!has_pred[j]) inst.precedence.emplace_back(0, j);
    if (!has_succ[j]) inst.precedence.emplace_back(j, inst.end_id());
  }
  std::sort(inst.precedence.begin(), inst.precedence.end());

  // Budgets cover the assignment that picks each activity's cheapest mode by
  // total nonrenewable consumption, so at least one feasible mode assignment
  // exists. (Per-resource minima alone would not do: different resources can
  // attain their minima in different modes.)
  inst.nonrenewable_capacity.assign(nonren, 0);
  for (int j = 1; j <= inst.real_count; ++j) {
    const auto& modes = inst.activities[j].modes;
    std::size_t cheapest = 0;
    int cheapest_total = modes[0].nonrenewable[0] + modes[0].nonrenewable[1];
    for (std::size_t m = 1; m < modes.size(); ++m) {
      const int total = modes[m].nonrenewable[0] + modes[m].nonrenewable[1];
      if (total < cheapest_total) {
        cheapest_total = total;
        cheapest = m;
      }
    }
    for (int l = 0; l < nonren; ++l)
      inst.nonrenewable_capacity[l] += modes[cheapest].nonrenewable[l];
  }
  for (int l = 0; l < nonren; ++l) inst.nonrenewable_capacity[l] += rng.uniform_int(0, 4);
  // a zero budget is only allowed when nothing ever requests the resource
  for (int l = 0; l < nonren; ++l) {
    if (inst.nonrenewable_capacity[l] > 0) continue;
    for (int j = 1; j <= inst.real_count; ++j)
      for (const auto& m : inst.activities[j].modes)
        if (m.nonrenewable[l] > 0) {
          inst.nonrenewable_capacity[l] = 1;
          j = inst.real_count;
          break;
        }
  }

  inst.original_nonrenewable_ids = {1, 2};
  inst.horizon_hint = makespan_upper_bound(inst);
  rebuild_adjacency(inst);
  return inst;
}

}  // namespace mrcpsp
