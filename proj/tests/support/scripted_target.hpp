#pragma once

// Stub targets for exercising the campaign loop without the processor:
// coverage comes from per-arm scripts instead of execution.

#include <functional>
#include <map>
#include <vector>

#include "banditfuzz/target.hpp"

namespace banditfuzz::testing {

class ScriptedTarget : public Target {
 public:
  // The behavior maps the arm's execution count (0-based) to covered points.
  using Behavior = std::function<std::vector<int>(int exec_index)>;

  explicit ScriptedTarget(int universe_size) : universe_(universe_size) {}

  void set_arm_behavior(int arm, Behavior behavior) { behaviors_[arm] = std::move(behavior); }

  int universe_size() const override { return universe_; }

  ExecutionResult run(const Test& test) override {
    CoverageSet covered(universe_);
    const int k = exec_counts_[test.arm_id]++;
    if (auto it = behaviors_.find(test.arm_id); it != behaviors_.end())
      for (int p : it->second(k)) covered.insert(p);
    return {std::move(covered), {}, {}};
  }

  int executions(int arm) const {
    auto it = exec_counts_.find(arm);
    return it == exec_counts_.end() ? 0 : it->second;
  }

 private:
  int universe_;
  std::map<int, Behavior> behaviors_;
  std::map<int, int> exec_counts_;
};

// Forwards to an inner target while recording the executed test stream.
class RecordingTarget : public Target {
 public:
  explicit RecordingTarget(Target& inner) : inner_(inner) {}

  int universe_size() const override { return inner_.universe_size(); }

  ExecutionResult run(const Test& test) override {
    executed.push_back(test);
    return inner_.run(test);
  }

  std::vector<Mismatch> bug_evidence(const Test& test, BugId bug) const override {
    return inner_.bug_evidence(test, bug);
  }

  std::vector<Test> executed;

 private:
  Target& inner_;
};

}  // namespace banditfuzz::testing
