#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace banditfuzz {

// Toy 32-bit ISA used by the built-in fuzzing target.
//
// Word layout:
//   opcode  bits [31:26]
//   rd      bits [25:22]
//   rs1     bits [21:18]
//   rs2     bits [17:14]
//   imm     bits [13:0], two's complement
enum class Opcode : std::uint8_t {
  Add = 0,
  Sub,
  And,
  Or,
  Xor,
  Slt,
  Addi,
  Andi,
  Ori,
  Lui,
  Lw,
  Sw,
  Beq,
  Bne,
  Jal,
  Csrrw,
  Ebreak,
  Fencei,
};

inline constexpr int kNumOpcodes = 18;
inline constexpr int kNumOpcodeValues = 64;  // 6-bit opcode field
inline constexpr int kImmBits = 14;
inline constexpr std::int32_t kImmMin = -(1 << (kImmBits - 1));
inline constexpr std::int32_t kImmMax = (1 << (kImmBits - 1)) - 1;

struct Instruction {
  Opcode op;
  std::uint8_t rd;
  std::uint8_t rs1;
  std::uint8_t rs2;
  std::int32_t imm;  // sign-extended

  bool operator==(const Instruction&) const = default;
};

constexpr std::uint32_t opcode_field(std::uint32_t word) { return word >> 26; }
constexpr std::uint8_t rd_field(std::uint32_t word) { return static_cast<std::uint8_t>((word >> 22) & 0xF); }
constexpr std::uint8_t rs1_field(std::uint32_t word) { return static_cast<std::uint8_t>((word >> 18) & 0xF); }
constexpr std::uint8_t rs2_field(std::uint32_t word) { return static_cast<std::uint8_t>((word >> 14) & 0xF); }

constexpr std::int32_t sign_extend_imm(std::uint32_t raw14) {
  return static_cast<std::int32_t>(raw14 << 18) >> 18;
}

constexpr std::int32_t imm_field(std::uint32_t word) {
  return sign_extend_imm(word & 0x3FFF);
}

constexpr std::uint32_t encode_fields(std::uint32_t opcode, std::uint32_t rd, std::uint32_t rs1,
                                      std::uint32_t rs2, std::uint32_t imm14) {
  return (opcode & 0x3F) << 26 | (rd & 0xF) << 22 | (rs1 & 0xF) << 18 | (rs2 & 0xF) << 14 |
         (imm14 & 0x3FFF);
}

constexpr std::uint32_t encode(const Instruction& instr) {
  return encode_fields(static_cast<std::uint32_t>(instr.op), instr.rd, instr.rs1, instr.rs2,
                       static_cast<std::uint32_t>(instr.imm));
}

constexpr std::uint32_t encode(Opcode op, std::uint8_t rd = 0, std::uint8_t rs1 = 0,
                               std::uint8_t rs2 = 0, std::int32_t imm = 0) {
  return encode(Instruction{op, rd, rs1, rs2, imm});
}

// Decodes a word; an unknown opcode value yields nullopt (illegal instruction).
constexpr std::optional<Instruction> decode(std::uint32_t word) {
  const std::uint32_t op = opcode_field(word);
  if (op >= kNumOpcodes) return std::nullopt;
  return Instruction{static_cast<Opcode>(op), rd_field(word), rs1_field(word), rs2_field(word),
                     imm_field(word)};
}

std::string_view opcode_name(Opcode op);

}  // namespace banditfuzz
