#include "banditfuzz/machine.hpp"

#include <sstream>
#include <stdexcept>

namespace banditfuzz {

std::string_view exc_name(ExcCause cause) {
  switch (cause) {
    case ExcCause::IllegalInstr: return "ILLEGAL_INSTR";
    case ExcCause::InvalidAddr: return "INVALID_ADDR";
    case ExcCause::Break: return "BREAK";
  }
  return "?";
}

std::string_view bug_name(BugId bug) {
  static constexpr std::string_view names[kNumBugs] = {"B1", "B2", "B3", "B4", "B5", "B6", "B7"};
  return names[static_cast<int>(bug)];
}

std::optional<BugId> parse_bug(std::string_view name) {
  for (int i = 0; i < kNumBugs; ++i)
    if (name == bug_name(static_cast<BugId>(i))) return static_cast<BugId>(i);
  return std::nullopt;
}

BugConfig BugConfig::all() {
  BugConfig c;
  c.on_.fill(true);
  return c;
}

BugConfig BugConfig::only(BugId bug) {
  BugConfig c;
  c.on_[static_cast<int>(bug)] = true;
  return c;
}

BugConfig BugConfig::parse(const std::string& text) {
  if (text == "all") return all();
  if (text == "none" || text.empty()) return none();
  BugConfig c;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    const auto bug = parse_bug(item);
    if (!bug) throw std::invalid_argument("unknown bug name: " + item);
    c.enable(*bug);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return c;
}

BugConfig& BugConfig::enable(BugId bug) {
  on_[static_cast<int>(bug)] = true;
  return *this;
}

bool BugConfig::any() const {
  for (bool b : on_)
    if (b) return true;
  return false;
}

std::vector<BugId> BugConfig::enabled_list() const {
  std::vector<BugId> out;
  for (int i = 0; i < kNumBugs; ++i)
    if (on_[i]) out.push_back(static_cast<BugId>(i));
  return out;
}

std::string BugConfig::to_string() const {
  std::string out;
  for (BugId b : enabled_list()) {
    if (!out.empty()) out += ',';
    out += bug_name(b);
  }
  return out.empty() ? "none" : out;
}

namespace {

void write_reg(ArchState& st, int rd, std::uint32_t value) {
  if (rd != 0) st.regs[rd] = value;
}

// Data address as a word index into mem.data; computed in 64 bits so the
// bounds check cannot wrap.
std::int64_t data_address(const ArchState& st, const Instruction& instr) {
  return static_cast<std::int64_t>(static_cast<std::int32_t>(st.regs[instr.rs1])) + instr.imm;
}

bool data_address_valid(std::int64_t addr) { return addr >= 0 && addr < kDataWords; }

void retire(ArchState& st, std::uint32_t next_pc) {
  st.pc = next_pc;
  ++st.instret;
}

void raise(ArchState& st, ExcCause cause) { st.exc_cause = cause; }

}  // namespace

void step_golden(ArchState& st, Memory& mem, std::uint32_t word) {
  const auto decoded = decode(word);
  if (!decoded) {
    raise(st, ExcCause::IllegalInstr);
    return;
  }
  const Instruction& in = *decoded;
  const std::uint32_t seq_pc = st.pc + 4;
  switch (in.op) {
    case Opcode::Add:
      write_reg(st, in.rd, st.regs[in.rs1] + st.regs[in.rs2]);
      retire(st, seq_pc);
      break;
    case Opcode::Sub:
      write_reg(st, in.rd, st.regs[in.rs1] - st.regs[in.rs2]);
      retire(st, seq_pc);
      break;
    case Opcode::And:
      write_reg(st, in.rd, st.regs[in.rs1] & st.regs[in.rs2]);
      retire(st, seq_pc);
      break;
    case Opcode::Or:
      write_reg(st, in.rd, st.regs[in.rs1] | st.regs[in.rs2]);
      retire(st, seq_pc);
      break;
    case Opcode::Xor:
      write_reg(st, in.rd, st.regs[in.rs1] ^ st.regs[in.rs2]);
      retire(st, seq_pc);
      break;
    case Opcode::Slt:
      write_reg(st, in.rd,
                static_cast<std::int32_t>(st.regs[in.rs1]) <
                        static_cast<std::int32_t>(st.regs[in.rs2])
                    ? 1u
                    : 0u);
      retire(st, seq_pc);
      break;
    case Opcode::Addi:
      write_reg(st, in.rd, st.regs[in.rs1] + static_cast<std::uint32_t>(in.imm));
      retire(st, seq_pc);
      break;
    case Opcode::Andi:
      write_reg(st, in.rd, st.regs[in.rs1] & static_cast<std::uint32_t>(in.imm));
      retire(st, seq_pc);
      break;
    case Opcode::Ori:
      write_reg(st, in.rd, st.regs[in.rs1] | static_cast<std::uint32_t>(in.imm));
      retire(st, seq_pc);
      break;
    case Opcode::Lui:
      write_reg(st, in.rd, static_cast<std::uint32_t>(in.imm) << kImmBits);
      retire(st, seq_pc);
      break;
    case Opcode::Lw: {
      const std::int64_t addr = data_address(st, in);
      if (!data_address_valid(addr)) {
        raise(st, ExcCause::InvalidAddr);
        break;
      }
      write_reg(st, in.rd, mem.data[static_cast<std::size_t>(addr)]);
      retire(st, seq_pc);
      break;
    }
    case Opcode::Sw: {
      const std::int64_t addr = data_address(st, in);
      if (!data_address_valid(addr)) {
        raise(st, ExcCause::InvalidAddr);
        break;
      }
      mem.data[static_cast<std::size_t>(addr)] = st.regs[in.rs2];
      retire(st, seq_pc);
      break;
    }
    case Opcode::Beq:
      retire(st, st.regs[in.rs1] == st.regs[in.rs2]
                     ? st.pc + 4u * static_cast<std::uint32_t>(in.imm)
                     : seq_pc);
      break;
    case Opcode::Bne:
      retire(st, st.regs[in.rs1] != st.regs[in.rs2]
                     ? st.pc + 4u * static_cast<std::uint32_t>(in.imm)
                     : seq_pc);
      break;
    case Opcode::Jal:
      write_reg(st, in.rd, seq_pc);
      retire(st, st.pc + 4u * static_cast<std::uint32_t>(in.imm));
      break;
    case Opcode::Csrrw: {
      if (in.imm < 0 || in.imm >= kNumCsrs) {
        raise(st, ExcCause::IllegalInstr);
        break;
      }
      const std::uint32_t old_reg = st.regs[in.rs1];
      write_reg(st, in.rs1, st.csrs[in.imm]);
      st.csrs[in.imm] = old_reg;
      retire(st, seq_pc);
      break;
    }
    case Opcode::Ebreak:
      raise(st, ExcCause::Break);
      retire(st, seq_pc);
      break;
    case Opcode::Fencei:
      retire(st, seq_pc);
      break;
  }
}

void step_dut(DutRunState& run, std::uint32_t word, const BugConfig& bugs,
              CoverageCollector& cov) {
  ArchState& st = run.arch;
  Memory& mem = run.mem;
  const bool stale_window = run.stale_armed;
  run.stale_armed = false;

  const auto decoded = decode(word);
  cov.report(BranchSite::DecodeLegal, decoded.has_value());
  if (!decoded) {
    if (bugs.enabled(BugId::B2) && opcode_field(word) == kSilentIllegalOpcode) {
      // B2: this illegal encoding slips through decode as a no-op.
      retire(st, st.pc + 4);
      return;
    }
    raise(st, ExcCause::IllegalInstr);
    return;
  }
  const Instruction& in = *decoded;

  // Dispatch is an if-else chain over opcodes 0..16; FENCEI is the final else.
  const int op_index = static_cast<int>(in.op);
  for (int j = 0; j < kNumOpcodes - 1; ++j) {
    cov.report(static_cast<BranchSite>(static_cast<int>(BranchSite::DispatchAdd) + j),
               j == op_index);
    if (j == op_index) break;
  }

  const auto dut_write_reg = [&](int rd, std::uint32_t value) {
    cov.report(BranchSite::RegWriteZero, rd == 0);
    write_reg(st, rd, value);
  };
  const auto raise_invalid_addr = [&] {
    // B3: the exception type is corrupted when csrs[0] is nonzero.
    if (bugs.enabled(BugId::B3) && st.csrs[0] != 0)
      raise(st, ExcCause::IllegalInstr);
    else
      raise(st, ExcCause::InvalidAddr);
  };

  const std::uint32_t seq_pc = st.pc + 4;
  switch (in.op) {
    case Opcode::Add:
      dut_write_reg(in.rd, st.regs[in.rs1] + st.regs[in.rs2]);
      retire(st, seq_pc);
      break;
    case Opcode::Sub:
      dut_write_reg(in.rd, st.regs[in.rs1] - st.regs[in.rs2]);
      retire(st, seq_pc);
      break;
    case Opcode::And:
      dut_write_reg(in.rd, st.regs[in.rs1] & st.regs[in.rs2]);
      retire(st, seq_pc);
      break;
    case Opcode::Or:
      dut_write_reg(in.rd, st.regs[in.rs1] | st.regs[in.rs2]);
      retire(st, seq_pc);
      break;
    case Opcode::Xor:
      dut_write_reg(in.rd, st.regs[in.rs1] ^ st.regs[in.rs2]);
      retire(st, seq_pc);
      break;
    case Opcode::Slt: {
      const bool lt = static_cast<std::int32_t>(st.regs[in.rs1]) <
                      static_cast<std::int32_t>(st.regs[in.rs2]);
      cov.report(BranchSite::SltTaken, lt);
      dut_write_reg(in.rd, lt ? 1u : 0u);
      retire(st, seq_pc);
      break;
    }
    case Opcode::Addi:
      dut_write_reg(in.rd, st.regs[in.rs1] + static_cast<std::uint32_t>(in.imm));
      retire(st, seq_pc);
      break;
    case Opcode::Andi:
      dut_write_reg(in.rd, st.regs[in.rs1] & static_cast<std::uint32_t>(in.imm));
      retire(st, seq_pc);
      break;
    case Opcode::Ori:
      dut_write_reg(in.rd, st.regs[in.rs1] | static_cast<std::uint32_t>(in.imm));
      retire(st, seq_pc);
      break;
    case Opcode::Lui:
      dut_write_reg(in.rd, static_cast<std::uint32_t>(in.imm) << kImmBits);
      retire(st, seq_pc);
      break;
    case Opcode::Lw: {
      const std::int64_t addr = data_address(st, in);
      const bool valid = data_address_valid(addr);
      cov.report(BranchSite::LwAddrValid, valid);
      if (valid) {
        std::uint32_t value = mem.data[static_cast<std::size_t>(addr)];
        // B4: a load in the shadow of the previous store sees the old value.
        if (bugs.enabled(BugId::B4) && stale_window && run.stale_addr &&
            *run.stale_addr == static_cast<int>(addr))
          value = run.stale_value;
        dut_write_reg(in.rd, value);
        retire(st, seq_pc);
      } else if (bugs.enabled(BugId::B5)) {
        // B5: invalid loads silently return zero instead of trapping.
        dut_write_reg(in.rd, 0);
        retire(st, seq_pc);
      } else {
        raise_invalid_addr();
      }
      break;
    }
    case Opcode::Sw: {
      const std::int64_t addr = data_address(st, in);
      const bool valid = data_address_valid(addr);
      cov.report(BranchSite::SwAddrValid, valid);
      if (valid) {
        run.stale_addr = static_cast<int>(addr);
        run.stale_value = mem.data[static_cast<std::size_t>(addr)];
        run.stale_armed = true;
        mem.data[static_cast<std::size_t>(addr)] = st.regs[in.rs2];
        retire(st, seq_pc);
      } else {
        raise_invalid_addr();
      }
      break;
    }
    case Opcode::Beq: {
      const bool taken = st.regs[in.rs1] == st.regs[in.rs2];
      cov.report(BranchSite::BeqTaken, taken);
      retire(st, taken ? st.pc + 4u * static_cast<std::uint32_t>(in.imm) : seq_pc);
      break;
    }
    case Opcode::Bne: {
      const bool taken = st.regs[in.rs1] != st.regs[in.rs2];
      cov.report(BranchSite::BneTaken, taken);
      retire(st, taken ? st.pc + 4u * static_cast<std::uint32_t>(in.imm) : seq_pc);
      break;
    }
    case Opcode::Jal:
      dut_write_reg(in.rd, seq_pc);
      retire(st, st.pc + 4u * static_cast<std::uint32_t>(in.imm));
      break;
    case Opcode::Csrrw: {
      const bool implemented = in.imm >= 0 && in.imm < kNumCsrs;
      cov.report(BranchSite::CsrImplemented, implemented);
      if (implemented) {
        const std::uint32_t old_reg = st.regs[in.rs1];
        dut_write_reg(in.rs1, st.csrs[in.imm]);
        st.csrs[in.imm] = old_reg;
        retire(st, seq_pc);
      } else if (bugs.enabled(BugId::B6)) {
        // B6: unimplemented CSR reads leak a fixed value instead of trapping.
        dut_write_reg(in.rd, kUnimplCsrLeak);
        retire(st, seq_pc);
      } else {
        raise(st, ExcCause::IllegalInstr);
      }
      break;
    }
    case Opcode::Ebreak:
      raise(st, ExcCause::Break);
      if (bugs.enabled(BugId::B7)) {
        // B7: the breakpoint halts without counting as retired.
        st.pc = seq_pc;
      } else {
        retire(st, seq_pc);
      }
      break;
    case Opcode::Fencei:
      if (bugs.enabled(BugId::B1) && in.rd != 0) {
        // B1: decoded as an immediate add when rd is nonzero.
        dut_write_reg(in.rd, st.regs[in.rs1] + static_cast<std::uint32_t>(in.imm));
      }
      retire(st, seq_pc);
      break;
  }
}

namespace {

bool in_instruction_region(std::uint32_t pc, std::size_t num_words) {
  return (pc >> 2) < num_words;
}

}  // namespace

ExecTrace run_golden(const Test& test, int step_cap) {
  ArchState st;
  Memory mem;
  ExecTrace trace;
  for (int steps = 0; steps < step_cap; ++steps) {
    if (!in_instruction_region(st.pc, test.words.size())) break;
    const std::uint32_t entry_pc = st.pc;
    step_golden(st, mem, test.words[st.pc >> 2]);
    trace.push_back({entry_pc, st});
    if (st.exc_cause) break;
  }
  return trace;
}

DutRunResult run_dut(const Test& test, const BugConfig& bugs, int step_cap) {
  DutRunState run;
  CoverageCollector cov;
  ExecTrace trace;
  for (int steps = 0; steps < step_cap; ++steps) {
    if (!in_instruction_region(run.arch.pc, test.words.size())) break;
    const std::uint32_t entry_pc = run.arch.pc;
    step_dut(run, test.words[run.arch.pc >> 2], bugs, cov);
    trace.push_back({entry_pc, run.arch});
    if (run.arch.exc_cause) break;
  }
  return {cov.take(), std::move(trace)};
}

RunResult run_test(const Test& test, const BugConfig& bugs, int step_cap) {
  if (test.words.empty()) throw std::invalid_argument("cannot run an empty test");
  DutRunResult dut = run_dut(test, bugs, step_cap);
  ExecTrace golden = run_golden(test, step_cap);
  return {std::move(dut.coverage), std::move(dut.trace), std::move(golden)};
}

namespace {

constexpr std::uint64_t kNoException = 0;

std::uint64_t exc_value(const std::optional<ExcCause>& cause) {
  return cause ? static_cast<std::uint64_t>(*cause) + 1 : kNoException;
}

void compare_field(std::vector<Mismatch>& out, std::size_t step, std::string field,
                   std::uint64_t dut, std::uint64_t golden) {
  if (dut != golden) out.push_back({step, std::move(field), dut, golden, std::nullopt});
}

}  // namespace

std::vector<Mismatch> diff(const ExecTrace& dut_trace, const ExecTrace& golden_trace) {
  std::vector<Mismatch> out;
  const std::size_t n = std::min(dut_trace.size(), golden_trace.size());
  for (std::size_t i = 0; i < n; ++i) {
    const TraceEntry& d = dut_trace[i];
    const TraceEntry& g = golden_trace[i];
    if (d == g) continue;
    compare_field(out, i, "entry_pc", d.pc, g.pc);
    compare_field(out, i, "pc", d.state.pc, g.state.pc);
    compare_field(out, i, "instret", d.state.instret, g.state.instret);
    compare_field(out, i, "exc_cause", exc_value(d.state.exc_cause), exc_value(g.state.exc_cause));
    for (int r = 0; r < kNumRegs; ++r)
      compare_field(out, i, "regs[" + std::to_string(r) + "]", d.state.regs[r],
                    g.state.regs[r]);
    for (int c = 0; c < kNumCsrs; ++c)
      compare_field(out, i, "csrs[" + std::to_string(c) + "]", d.state.csrs[c],
                    g.state.csrs[c]);
  }
  if (dut_trace.size() != golden_trace.size())
    out.push_back({n, "trace_length", dut_trace.size(), golden_trace.size(), std::nullopt});
  return out;
}

std::string format_mismatch(const Mismatch& m) {
  std::ostringstream os;
  os << "step=" << m.step << " field=" << m.field;
  if (m.field == "exc_cause") {
    const auto name = [](std::uint64_t v) -> std::string {
      if (v == kNoException) return "none";
      return std::string(exc_name(static_cast<ExcCause>(v - 1)));
    };
    os << " dut=" << name(m.dut_value) << " golden=" << name(m.golden_value);
  } else if (m.field == "trace_length") {
    os << " dut=" << m.dut_value << " golden=" << m.golden_value;
  } else {
    os << std::hex << " dut=0x" << m.dut_value << " golden=0x" << m.golden_value;
  }
  return os.str();
}

}  // namespace banditfuzz
