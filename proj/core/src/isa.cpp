#include "banditfuzz/isa.hpp"

namespace banditfuzz {

std::string_view opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Add: return "ADD";
    case Opcode::Sub: return "SUB";
    case Opcode::And: return "AND";
    case Opcode::Or: return "OR";
    case Opcode::Xor: return "XOR";
    case Opcode::Slt: return "SLT";
    case Opcode::Addi: return "ADDI";
    case Opcode::Andi: return "ANDI";
    case Opcode::Ori: return "ORI";
    case Opcode::Lui: return "LUI";
    case Opcode::Lw: return "LW";
    case Opcode::Sw: return "SW";
    case Opcode::Beq: return "BEQ";
    case Opcode::Bne: return "BNE";
    case Opcode::Jal: return "JAL";
    case Opcode::Csrrw: return "CSRRW";
    case Opcode::Ebreak: return "EBREAK";
    case Opcode::Fencei: return "FENCEI";
  }
  return "?";
}

}  // namespace banditfuzz
