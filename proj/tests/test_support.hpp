#pragma once

// Hand-built instance fixtures for tests.

#include <utility>
#include <vector>

#include "mrcpsp/project.hpp"

namespace test_support {

struct InstanceBuilder {
  mrcpsp::ProjectInstance inst;

  InstanceBuilder(int real_count, std::vector<int> renewable_caps,
                  std::vector<int> nonrenewable_caps) {
    inst.real_count = real_count;
    inst.activities.resize(real_count + 2);
    inst.renewable_capacity = std::move(renewable_caps);
    inst.nonrenewable_capacity = std::move(nonrenewable_caps);
    for (int j : {0, inst.end_id()}) {
      auto& act = inst.activities[j];
      act.modes.push_back(mrcpsp::Mode{0, std::vector<int>(inst.renewable_count(), 0),
                                       std::vector<int>(inst.nonrenewable_count(), 0)});
      act.original_mode_ids.push_back(1);
    }
  }

  InstanceBuilder& mode(int activity, int duration, std::vector<int> renewable,
                        std::vector<int> nonrenewable) {
    auto& act = inst.activities[activity];
    act.modes.push_back(mrcpsp::Mode{duration, std::move(renewable), std::move(nonrenewable)});
    act.original_mode_ids.push_back(static_cast<int>(act.modes.size()));
    return *this;
  }

  InstanceBuilder& arc(int from, int to) {
    inst.precedence.emplace_back(from, to);
    return *this;
  }

  // Adds dummy arcs for real activities without real predecessors or
  // successors, then finalizes adjacency.
  mrcpsp::ProjectInstance build() {
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
    inst.original_nonrenewable_ids.clear();
    for (int l = 0; l < inst.nonrenewable_count(); ++l)
      inst.original_nonrenewable_ids.push_back(l + 1);
    inst.horizon_hint = mrcpsp::makespan_upper_bound(inst);
    mrcpsp::rebuild_adjacency(inst);
    return inst;
  }
};

}  // namespace test_support
