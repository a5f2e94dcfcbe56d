#pragma once

#include <vector>

#include "banditfuzz/coverage.hpp"
#include "banditfuzz/machine.hpp"
#include "banditfuzz/testgen.hpp"

namespace banditfuzz {

struct ExecutionResult {
  CoverageSet covered;
  ExecTrace dut_trace;
  ExecTrace golden_trace;
};

// What the campaign loop fuzzes. The built-in target is the instrumented toy
// processor; tests substitute scripted targets.
class Target {
 public:
  virtual ~Target() = default;
  virtual int universe_size() const = 0;
  virtual ExecutionResult run(const Test& test) = 0;
  // Attribution probe: re-runs the device with exactly this one bug enabled
  // and returns the resulting divergence (empty when the test does not expose
  // it). Targets without injectable bugs return nothing.
  virtual std::vector<Mismatch> bug_evidence(const Test& test, BugId bug) const;
};

class IsaTarget : public Target {
 public:
  explicit IsaTarget(BugConfig bugs, int step_cap = kDefaultStepCap)
      : bugs_(bugs), step_cap_(step_cap) {}

  int universe_size() const override { return kCoverageUniverse; }
  ExecutionResult run(const Test& test) override;
  std::vector<Mismatch> bug_evidence(const Test& test, BugId bug) const override;

  const BugConfig& bugs() const { return bugs_; }
  int step_cap() const { return step_cap_; }

 private:
  BugConfig bugs_;
  int step_cap_;
};

}  // namespace banditfuzz
