#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "banditfuzz/coverage.hpp"
#include "banditfuzz/isa.hpp"
#include "banditfuzz/testgen.hpp"

namespace banditfuzz {

inline constexpr int kNumRegs = 16;
inline constexpr int kNumCsrs = 4;
inline constexpr int kDataWords = 256;
inline constexpr int kDefaultStepCap = 1000;
// Value a buggy device leaks from unimplemented CSRs.
inline constexpr std::uint32_t kUnimplCsrLeak = 0xDEADBEEFu;
// Illegal opcode value the decoder bug silently accepts.
inline constexpr std::uint32_t kSilentIllegalOpcode = 62;

enum class ExcCause : std::uint8_t {
  IllegalInstr = 0,
  InvalidAddr,
  Break,
};

std::string_view exc_name(ExcCause cause);

// Architectural state compared between the device and the reference model.
// regs[0] is hardwired to zero. An executed instruction either retires
// (instret advances) or raises an exception (exc_cause set, no retire);
// either way execution halts on any exception.
struct ArchState {
  std::array<std::uint32_t, kNumRegs> regs{};
  std::uint32_t pc = 0;
  std::array<std::uint32_t, kNumCsrs> csrs{};
  std::uint64_t instret = 0;
  std::optional<ExcCause> exc_cause;

  bool operator==(const ArchState&) const = default;
};

struct Memory {
  std::array<std::uint32_t, kDataWords> data{};
};

// The seven injectable defects. Each is an analog of a distinct
// vulnerability class: wrong decode, silently executed illegal instruction,
// wrong exception type, stale store-to-load forwarding, missing exception,
// unimplemented-CSR leak, and a retired-instruction counter bug.
enum class BugId : int { B1 = 0, B2, B3, B4, B5, B6, B7 };
inline constexpr int kNumBugs = 7;

std::string_view bug_name(BugId bug);
std::optional<BugId> parse_bug(std::string_view name);

class BugConfig {
 public:
  static BugConfig none() { return BugConfig{}; }
  static BugConfig all();
  static BugConfig only(BugId bug);
  // Comma-separated bug names ("B1,B4") or "all" / "none".
  static BugConfig parse(const std::string& text);

  BugConfig& enable(BugId bug);
  bool enabled(BugId bug) const { return on_[static_cast<int>(bug)]; }
  bool any() const;
  std::vector<BugId> enabled_list() const;
  std::string to_string() const;

  bool operator==(const BugConfig&) const = default;

 private:
  std::array<bool, kNumBugs> on_{};
};

// Branch sites in the interpreter; every two-way conditional contributes a
// taken and a not-taken coverage point. The opcode dispatch is modelled as
// the if-else chain over opcodes 0..16 with FENCEI as the trailing else, so
// every listed point is reachable.
enum class BranchSite : int {
  DecodeLegal = 0,
  DispatchAdd,
  DispatchSub,
  DispatchAnd,
  DispatchOr,
  DispatchXor,
  DispatchSlt,
  DispatchAddi,
  DispatchAndi,
  DispatchOri,
  DispatchLui,
  DispatchLw,
  DispatchSw,
  DispatchBeq,
  DispatchBne,
  DispatchJal,
  DispatchCsrrw,
  DispatchEbreak,
  RegWriteZero,
  SltTaken,
  BeqTaken,
  BneTaken,
  LwAddrValid,
  SwAddrValid,
  CsrImplemented,
};
inline constexpr int kNumBranchSites = 25;
inline constexpr int kCoverageUniverse = 2 * kNumBranchSites;

constexpr int branch_point(BranchSite site, bool taken) {
  return 2 * static_cast<int>(site) + (taken ? 0 : 1);
}

// Collects branch points hit during a device run.
class CoverageCollector {
 public:
  CoverageCollector() : set_(kCoverageUniverse) {}
  void report(BranchSite site, bool taken) { set_.insert(branch_point(site, taken)); }
  const CoverageSet& set() const { return set_; }
  CoverageSet take() { return std::move(set_); }

 private:
  CoverageSet set_;
};

// One entry per executed instruction: the instruction's address and the full
// architectural state after the step (including any exception raised by it).
struct TraceEntry {
  std::uint32_t pc = 0;
  ArchState state;

  bool operator==(const TraceEntry&) const = default;
};
using ExecTrace = std::vector<TraceEntry>;

struct Mismatch {
  std::size_t step = 0;
  std::string field;
  std::uint64_t dut_value = 0;
  std::uint64_t golden_value = 0;
  // Filled post-hoc during bug attribution.
  std::optional<BugId> matched_bug;
};

// Reference semantics for one instruction. The caller guarantees the machine
// has not halted. `word` is the fetched instruction at state.pc.
void step_golden(ArchState& state, Memory& mem, std::uint32_t word);

// Device state that persists across steps but is not architectural: the
// one-instruction staleness window used by the store/load defect.
struct DutRunState {
  ArchState arch;
  Memory mem;
  // Valid for exactly the next retired instruction after a store.
  std::optional<int> stale_addr;
  std::uint32_t stale_value = 0;
  bool stale_armed = false;
};

// Device semantics: identical to the reference except where an enabled bug's
// trigger condition holds. Reports every two-way conditional it evaluates.
void step_dut(DutRunState& run, std::uint32_t word, const BugConfig& bugs,
              CoverageCollector& coverage);

ExecTrace run_golden(const Test& test, int step_cap = kDefaultStepCap);

struct DutRunResult {
  CoverageSet coverage;
  ExecTrace trace;
};
DutRunResult run_dut(const Test& test, const BugConfig& bugs, int step_cap = kDefaultStepCap);

struct RunResult {
  CoverageSet coverage;  // branch points hit by the device run
  ExecTrace dut_trace;
  ExecTrace golden_trace;
};

// Runs both machines from reset on the test mapped at address 0, until halt,
// the pc leaving the instruction region, or the step cap.
RunResult run_test(const Test& test, const BugConfig& bugs, int step_cap = kDefaultStepCap);

// Element-wise comparison up to the shorter trace, plus one length record if
// the traces disagree in length.
std::vector<Mismatch> diff(const ExecTrace& dut_trace, const ExecTrace& golden_trace);

std::string format_mismatch(const Mismatch& m);

}  // namespace banditfuzz
