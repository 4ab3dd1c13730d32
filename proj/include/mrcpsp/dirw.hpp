#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrcpsp/project.hpp"
#include "mrcpsp/rng.hpp"
#include "mrcpsp/schedule.hpp"

namespace mrcpsp {

// Range of list slots where a removed activity may be reinserted. Slots are
// 1-based on the post-deletion list: inserting at slot p puts the activity
// at position p. Both ends inclusive.
struct InsertionWindow {
  int lo = 1;
  int hi = 1;
};

// Slots bounded by the activity's latest-listed direct predecessor and
// earliest-listed direct successor. Transitive relatives sit outside those
// bounds in any precedence-feasible list, so every slot in the window keeps
// the list feasible.
inline InsertionWindow insertion_window(const std::vector<int>& order_after_delete, int activity,
                                        const ProjectInstance& inst) {
  const auto& act = inst.activities[activity];
  InsertionWindow window;
  window.lo = 1;
  window.hi = static_cast<int>(order_after_delete.size()) + 1;
  for (std::size_t pos = 0; pos < order_after_delete.size(); ++pos) {
    const int other = order_after_delete[pos];
    if (std::find(act.predecessors.begin(), act.predecessors.end(), other) !=
        act.predecessors.end())
      window.lo = std::max(window.lo, static_cast<int>(pos) + 2);
    if (std::find(act.successors.begin(), act.successors.end(), other) != act.successors.end())
      window.hi = std::min(window.hi, static_cast<int>(pos) + 1);
  }
  return window;
}

namespace detail {

inline int pick_mode(const std::vector<int>& mode_by_activity, int activity,
                     const ProjectInstance& inst) {
  const auto& modes = inst.activities[activity].modes;
  const bool within_budgets = nonrenewable_excess(mode_by_activity, inst) == 0.0;
  int best = 0;
  long long best_key = 0;
  auto key_of = [&](const Mode& m) -> long long {
    if (within_budgets) return m.duration;
    long long total = 0;
    for (int r : m.nonrenewable) total += r;
    return total;
  };
  best_key = key_of(modes[0]);
  for (std::size_t mi = 1; mi < modes.size(); ++mi) {
    const long long k = key_of(modes[mi]);
    if (k < best_key) {  // ties keep the lowest mode index
      best_key = k;
      best = static_cast<int>(mi);
    }
  }
  return best;
}

}  // namespace detail

// Mode repair rule: while the current assignment fits all nonrenewable
// budgets, take the activity's fastest mode; once it overshoots, take the
// mode with the smallest total nonrenewable consumption. Ties resolve to the
// lowest mode index.
inline int reassign_mode(const ActivityModeList& aml, int activity, const ProjectInstance& inst) {
  if (inst.activities[activity].modes.empty())
    throw std::invalid_argument("activity " + std::to_string(activity) + " has no modes");
  return detail::pick_mode(modes_by_activity(aml, inst), activity, inst);
}

// Delete-then-insert random walk over one list. Every real activity is
// visited in id order; with probability accept_rate its mode is repaired,
// it is removed from the list and reinserted at a uniformly random slot of
// its feasible window. Moves commit unconditionally; there is no fitness
// test. The output is precedence-feasible whenever the input is.
inline ActivityModeList dirw_pass(const ActivityModeList& aml, const ProjectInstance& inst,
                                  double accept_rate, Rng& rng) {
  std::vector<int> order = aml.order;
  std::vector<int> mode_of = modes_by_activity(aml, inst);

  for (int j = 1; j <= inst.real_count; ++j) {
    const double q = rng.uniform01();
    if (q >= accept_rate) continue;

    mode_of[j] = detail::pick_mode(mode_of, j, inst);
    auto at = std::find(order.begin(), order.end(), j);
    order.erase(at);
    const InsertionWindow window = insertion_window(order, j, inst);
    const int slot = rng.uniform_int(window.lo, window.hi);
    order.insert(order.begin() + (slot - 1), j);
  }

  ActivityModeList out;
  out.order = std::move(order);
  out.modes.resize(out.order.size());
  for (std::size_t i = 0; i < out.order.size(); ++i) out.modes[i] = mode_of[out.order[i]];
  return out;
}

}  // namespace mrcpsp
