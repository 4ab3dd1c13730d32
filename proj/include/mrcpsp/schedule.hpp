#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrcpsp/project.hpp"

namespace mrcpsp {

// Solution encoding: a precedence-feasible ordering of the real activities
// paired with one mode choice per position. modes[i] is the 0-based mode
// index of activities[order[i]].
struct ActivityModeList {
  std::vector<int> order;
  std::vector<int> modes;
};

// Per-solver-run tally of generated schedules; every decoder call counts one.
struct ScheduleCounter {
  std::int64_t generated = 0;
};

struct Schedule {
  std::vector<int> start;   // indexed by activity id 0..J+1
  std::vector<int> finish;
  int makespan = 0;
  double nonrenewable_excess = 0.0;
  bool feasible = false;    // precedence + renewable + nonrenewable all satisfied
};

struct FitnessValue {
  double scalar = 0.0;
  bool feasible = false;
};

struct DeadlineTooTightError : std::runtime_error {
  explicit DeadlineTooTightError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ZeroCapacityError : std::runtime_error {
  explicit ZeroCapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mode choice per activity id (dummies pinned to their single mode).
inline std::vector<int> modes_by_activity(const ActivityModeList& aml,
                                          const ProjectInstance& inst) {
  std::vector<int> chosen(inst.total_count(), 0);
  for (std::size_t i = 0; i < aml.order.size(); ++i) chosen[aml.order[i]] = aml.modes[i];
  return chosen;
}

// Structural checks on an encoding: permutation of 1..J, order respects the
// direct precedence arcs among real activities, mode indices in range.
inline std::vector<std::string> check_activity_mode_list(const ActivityModeList& aml,
                                                         const ProjectInstance& inst) {
  std::vector<std::string> violations;
  const int reals = inst.real_count;
  if (static_cast<int>(aml.order.size()) != reals || aml.modes.size() != aml.order.size()) {
    violations.push_back("list lengths do not match the activity count");
    return violations;
  }
  std::vector<int> position(inst.total_count(), -1);
  for (int i = 0; i < reals; ++i) {
    const int j = aml.order[i];
    if (j < 1 || j > reals) {
      violations.push_back("entry " + std::to_string(j) + " is not a real activity id");
      return violations;
    }
    if (position[j] != -1) violations.push_back("activity " + std::to_string(j) + " listed twice");
    position[j] = i;
    const auto& act = inst.activities[j];
    if (aml.modes[i] < 0 || aml.modes[i] >= static_cast<int>(act.modes.size()))
      violations.push_back("activity " + std::to_string(j) + " assigned an unknown mode");
  }
  for (const auto& [from, to] : inst.precedence) {
    if (from < 1 || from > reals || to < 1 || to > reals) continue;
    if (position[from] < 0 || position[to] < 0) continue;
    if (position[from] > position[to])
      violations.push_back("activity " + std::to_string(from) + " listed after its successor " +
                           std::to_string(to));
  }
  return violations;
}

// Nonrenewable overuse of a mode assignment: summed fractional overshoot of
// each budget, zero exactly when every budget is respected.
inline double nonrenewable_excess(const std::vector<int>& mode_by_activity,
                                  const ProjectInstance& inst) {
  double excess = 0.0;
  for (int l = 0; l < inst.nonrenewable_count(); ++l) {
    long long used = 0;
    for (int j = 1; j <= inst.real_count; ++j)
      used += inst.activities[j].modes[mode_by_activity[j]].nonrenewable[l];
    const long long cap = inst.nonrenewable_capacity[l];
    if (used <= cap) continue;
    if (cap == 0)
      throw ZeroCapacityError("nonrenewable resource " + std::to_string(l + 1) +
                              " has zero capacity but positive requests");
    excess += static_cast<double>(used - cap) / static_cast<double>(cap);
  }
  return excess;
}

inline double nonrenewable_excess(const ActivityModeList& aml, const ProjectInstance& inst) {
  return nonrenewable_excess(modes_by_activity(aml, inst), inst);
}

namespace detail {

// Earliest start >= est whose whole run fits under every renewable capacity.
// usage holds the committed consumption per resource and period.
inline int earliest_fit(const std::vector<std::vector<int>>& usage,
                        const std::vector<int>& capacity, const std::vector<int>& demand,
                        int est, int duration) {
  if (duration == 0) return est;
  int t = est;
  for (;;) {
    int conflict = -1;
    for (int p = t; p < t + duration && conflict < 0; ++p)
      for (std::size_t k = 0; k < capacity.size(); ++k)
        if (usage[k][p] + demand[k] > capacity[k]) {
          conflict = p;
          break;
        }
    if (conflict < 0) return t;
    t = conflict + 1;  // every start in (t, conflict] still covers the conflicting period
  }
}

// Latest start <= lft - duration that fits; -1 when none exists above 0.
inline int latest_fit(const std::vector<std::vector<int>>& usage, const std::vector<int>& capacity,
                      const std::vector<int>& demand, int lft, int duration) {
  if (duration == 0) return lft;
  int s = lft - duration;
  while (s >= 0) {
    int conflict = -1;
    for (int p = s + duration - 1; p >= s && conflict < 0; --p)
      for (std::size_t k = 0; k < capacity.size(); ++k)
        if (usage[k][p] + demand[k] > capacity[k]) {
          conflict = p;
          break;
        }
    if (conflict < 0) return s;
    s = conflict - duration;  // slide the window to end just before the conflict
  }
  return -1;
}

inline void occupy(std::vector<std::vector<int>>& usage, const std::vector<int>& demand, int start,
                   int duration) {
  for (std::size_t k = 0; k < usage.size(); ++k)
    if (demand[k] != 0)
      for (int p = start; p < start + duration; ++p) usage[k][p] += demand[k];
}

}  // namespace detail

// Serial schedule generation: activities are placed in list order at the
// earliest start compatible with their predecessors and the renewable
// capacities. Nonrenewable budgets are not enforced here; the overshoot is
// measured and recorded on the result.
inline Schedule decode_forward(const ActivityModeList& aml, const ProjectInstance& inst,
                               ScheduleCounter& counter) {
  const int n = inst.total_count();
  Schedule sched;
  sched.start.assign(n, 0);
  sched.finish.assign(n, 0);

  int horizon = 0;
  for (std::size_t i = 0; i < aml.order.size(); ++i)
    horizon += inst.activities[aml.order[i]].modes[aml.modes[i]].duration;

  std::vector<std::vector<int>> usage(inst.renewable_count(), std::vector<int>(horizon, 0));
  for (std::size_t i = 0; i < aml.order.size(); ++i) {
    const int j = aml.order[i];
    const Mode& mode = inst.activities[j].modes[aml.modes[i]];
    for (int k = 0; k < inst.renewable_count(); ++k)
      if (mode.renewable[k] > inst.renewable_capacity[k])
        throw std::invalid_argument("activity " + std::to_string(j) +
                                    " demands more of renewable resource " + std::to_string(k + 1) +
                                    " than exists");
    int est = 0;
    for (int pred : inst.activities[j].predecessors) est = std::max(est, sched.finish[pred]);
    const int t =
        detail::earliest_fit(usage, inst.renewable_capacity, mode.renewable, est, mode.duration);
    detail::occupy(usage, mode.renewable, t, mode.duration);
    sched.start[j] = t;
    sched.finish[j] = t + mode.duration;
  }

  int end_time = 0;
  for (int j = 1; j <= inst.real_count; ++j) end_time = std::max(end_time, sched.finish[j]);
  sched.start[inst.end_id()] = end_time;
  sched.finish[inst.end_id()] = end_time;
  sched.makespan = end_time;
  sched.nonrenewable_excess = nonrenewable_excess(modes_by_activity(aml, inst), inst);
  sched.feasible = sched.nonrenewable_excess == 0.0;
  counter.generated += 1;
  return sched;
}

// Mirror of decode_forward: activities are taken in reverse list order and
// placed as late as the deadline, their successors and the renewable
// capacities allow; the result is then shifted left so the earliest start is
// zero. Throws DeadlineTooTightError when some activity cannot be placed.
inline Schedule decode_backward(const ActivityModeList& aml, const ProjectInstance& inst,
                                int deadline, ScheduleCounter& counter) {
  const int n = inst.total_count();
  Schedule sched;
  sched.start.assign(n, 0);
  sched.finish.assign(n, 0);
  sched.start[inst.end_id()] = deadline;
  sched.finish[inst.end_id()] = deadline;

  std::vector<std::vector<int>> usage(inst.renewable_count(),
                                      std::vector<int>(std::max(deadline, 0), 0));
  std::vector<bool> placed(n, false);
  placed[inst.end_id()] = true;

  for (std::size_t i = aml.order.size(); i-- > 0;) {
    const int j = aml.order[i];
    const Mode& mode = inst.activities[j].modes[aml.modes[i]];
    int lft = deadline;
    for (int succ : inst.activities[j].successors)
      if (placed[succ]) lft = std::min(lft, sched.start[succ]);
    if (mode.duration > lft)
      throw DeadlineTooTightError("activity " + std::to_string(j) +
                                  " cannot finish by period " + std::to_string(lft));
    const int s =
        detail::latest_fit(usage, inst.renewable_capacity, mode.renewable, lft, mode.duration);
    if (s < 0)
      throw DeadlineTooTightError("no renewable-feasible slot for activity " + std::to_string(j) +
                                  " under deadline " + std::to_string(deadline));
    detail::occupy(usage, mode.renewable, s, mode.duration);
    sched.start[j] = s;
    sched.finish[j] = s + mode.duration;
    placed[j] = true;
  }

  int shift = deadline;
  if (aml.order.empty()) shift = 0;
  for (int j : aml.order) shift = std::min(shift, sched.start[j]);
  int end_time = 0;
  for (int j : aml.order) {
    sched.start[j] -= shift;
    sched.finish[j] -= shift;
    end_time = std::max(end_time, sched.finish[j]);
  }
  sched.start[0] = sched.finish[0] = 0;
  sched.start[inst.end_id()] = sched.finish[inst.end_id()] = end_time;
  sched.makespan = end_time;
  sched.nonrenewable_excess = nonrenewable_excess(modes_by_activity(aml, inst), inst);
  sched.feasible = sched.nonrenewable_excess == 0.0;
  counter.generated += 1;
  return sched;
}

// Fitness: the makespan when the mode assignment fits all nonrenewable
// budgets, otherwise a penalty that strictly exceeds every attainable
// makespan and grows with the overshoot. Lower is better.
inline FitnessValue fitness_of(const Schedule& sched, const ProjectInstance& inst) {
  FitnessValue fit;
  fit.feasible = sched.nonrenewable_excess == 0.0;
  if (fit.feasible)
    fit.scalar = static_cast<double>(sched.makespan);
  else
    fit.scalar = static_cast<double>(makespan_upper_bound(inst)) * (1.0 + sched.nonrenewable_excess);
  return fit;
}

namespace detail {

// List the real activities ordered by the given per-activity key, ties by
// lower id. Topological numbering makes the id tie-break precedence-safe.
inline ActivityModeList order_by_key(const std::vector<int>& key,
                                     const std::vector<int>& mode_by_activity,
                                     const ProjectInstance& inst) {
  ActivityModeList out;
  out.order.resize(inst.real_count);
  for (int j = 1; j <= inst.real_count; ++j) out.order[j - 1] = j;
  std::sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    if (key[a] != key[b]) return key[a] < key[b];
    return a < b;
  });
  out.modes.resize(out.order.size());
  for (std::size_t i = 0; i < out.order.size(); ++i) out.modes[i] = mode_by_activity[out.order[i]];
  return out;
}

}  // namespace detail

struct JustifiedResult {
  ActivityModeList aml;
  Schedule schedule;
};

// Double justification with modes held fixed: right-justify against the
// current makespan (activities taken by decreasing finish time), then
// left-justify the result (by increasing start time), repeating while the
// makespan improves. schedule_budget caps how many more schedules may be
// generated; a pass in flight always completes. The returned list is the
// final schedule's start-time order.
inline JustifiedResult double_justify(const ActivityModeList& aml, const Schedule& schedule,
                                      const ProjectInstance& inst, ScheduleCounter& counter,
                                      std::int64_t schedule_budget) {
  JustifiedResult best{aml, schedule};
  const auto mode_of = modes_by_activity(aml, inst);
  std::int64_t used = 0;

  for (;;) {
    const int before = best.schedule.makespan;
    if (used >= schedule_budget) break;

    const auto backward_list = detail::order_by_key(best.schedule.finish, mode_of, inst);
    Schedule right = decode_backward(backward_list, inst, best.schedule.makespan, counter);
    ++used;
    if (right.makespan < best.schedule.makespan)
      best = {detail::order_by_key(right.start, mode_of, inst), right};
    if (used >= schedule_budget) break;

    const auto forward_list = detail::order_by_key(right.start, mode_of, inst);
    Schedule left = decode_forward(forward_list, inst, counter);
    ++used;
    if (left.makespan < best.schedule.makespan)
      best = {detail::order_by_key(left.start, mode_of, inst), left};

    if (best.schedule.makespan >= before) break;  // a full round brought no improvement
  }
  return best;
}

// Re-checks a schedule from first principles: mode validity, start/finish
// arithmetic, precedence, per-period renewable usage and nonrenewable
// totals. Shares no code with the decoders.
inline std::vector<std::string> verify_schedule(const Schedule& sched,
                                                const std::vector<int>& mode_by_activity,
                                                const ProjectInstance& inst) {
  std::vector<std::string> violations;
  const int n = inst.total_count();
  if (static_cast<int>(sched.start.size()) != n || static_cast<int>(sched.finish.size()) != n) {
    violations.push_back("schedule arrays do not cover all activities");
    return violations;
  }
  if (static_cast<int>(mode_by_activity.size()) != n) {
    violations.push_back("mode assignment does not cover all activities");
    return violations;
  }
  for (int j = 0; j < n; ++j) {
    const auto& act = inst.activities[j];
    const int m = mode_by_activity[j];
    if (m < 0 || m >= static_cast<int>(act.modes.size())) {
      violations.push_back("activity " + std::to_string(j) + " assigned an unknown mode");
      return violations;
    }
    if (sched.start[j] < 0)
      violations.push_back("activity " + std::to_string(j) + " starts before period 0");
    if (sched.finish[j] != sched.start[j] + act.modes[m].duration)
      violations.push_back("activity " + std::to_string(j) +
                           " finish time does not match start plus duration");
  }
  if (sched.start[0] != 0) violations.push_back("dummy start not at period 0");

  for (const auto& [from, to] : inst.precedence)
    if (sched.finish[from] > sched.start[to])
      violations.push_back("precedence violation: activity " + std::to_string(from) +
                           " finishes at " + std::to_string(sched.finish[from]) + " after successor " +
                           std::to_string(to) + " starts at " + std::to_string(sched.start[to]));

  int last = 0;
  for (int j = 0; j < n; ++j) last = std::max(last, sched.finish[j]);
  for (int k = 0; k < inst.renewable_count(); ++k) {
    for (int t = 0; t < last; ++t) {
      int used = 0;
      for (int j = 1; j <= inst.real_count; ++j)
        if (sched.start[j] <= t && t < sched.finish[j])
          used += inst.activities[j].modes[mode_by_activity[j]].renewable[k];
      if (used > inst.renewable_capacity[k]) {
        violations.push_back("renewable resource " + std::to_string(k + 1) + " overloaded at period " +
                             std::to_string(t) + " (" + std::to_string(used) + " > " +
                             std::to_string(inst.renewable_capacity[k]) + ")");
        break;  // one report per resource keeps the verdict readable
      }
    }
  }
  for (int l = 0; l < inst.nonrenewable_count(); ++l) {
    long long used = 0;
    for (int j = 1; j <= inst.real_count; ++j)
      used += inst.activities[j].modes[mode_by_activity[j]].nonrenewable[l];
    if (used > inst.nonrenewable_capacity[l])
      violations.push_back("nonrenewable resource " + std::to_string(l + 1) + " over budget (" +
                           std::to_string(used) + " > " +
                           std::to_string(inst.nonrenewable_capacity[l]) + ")");
  }
  return violations;
}

}  // namespace mrcpsp
