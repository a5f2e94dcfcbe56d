#include "banditfuzz/target.hpp"

namespace banditfuzz {

std::vector<Mismatch> Target::bug_evidence(const Test&, BugId) const { return {}; }

ExecutionResult IsaTarget::run(const Test& test) {
  RunResult r = run_test(test, bugs_, step_cap_);
  return {std::move(r.coverage), std::move(r.dut_trace), std::move(r.golden_trace)};
}

std::vector<Mismatch> IsaTarget::bug_evidence(const Test& test, BugId bug) const {
  if (!bugs_.enabled(bug)) return {};
  RunResult r = run_test(test, BugConfig::only(bug), step_cap_);
  std::vector<Mismatch> mismatches = diff(r.dut_trace, r.golden_trace);
  for (Mismatch& m : mismatches) m.matched_bug = bug;
  return mismatches;
}

}  // namespace banditfuzz
