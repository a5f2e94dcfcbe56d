#include "banditfuzz/testgen.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "banditfuzz/isa.hpp"

namespace banditfuzz {

void validate(const MutationConfig& config) {
  if (config.mutants_per_interesting < 1)
    throw std::invalid_argument("mutants_per_interesting must be positive");
  double sum = 0.0;
  for (double w : config.operator_weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("operator weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("operator weights must sum to 1");
}

int pick_weighted(Rng& rng, std::span<const double> weights) {
  const double u = rng.next_double();
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::uint32_t random_word(Rng& rng) {
  if (rng.chance(kValidWordBias)) {
    const auto op = static_cast<std::uint32_t>(rng.next_index(kNumOpcodes));
    const auto rd = static_cast<std::uint32_t>(rng.next_index(16));
    const auto rs1 = static_cast<std::uint32_t>(rng.next_index(16));
    const auto rs2 = static_cast<std::uint32_t>(rng.next_index(16));
    const auto imm = static_cast<std::uint32_t>(rng.next_index(1u << kImmBits));
    return encode_fields(op, rd, rs1, rs2, imm);
  }
  return static_cast<std::uint32_t>(rng.next_u64());
}

Test gen_seed(Rng& rng, TestIdAllocator& ids, int arm_id, int length) {
  if (length < 1) throw std::invalid_argument("test length must be positive");
  Test t;
  t.id = ids.alloc();
  t.arm_id = arm_id;
  t.words.reserve(length);
  for (int i = 0; i < length; ++i) t.words.push_back(random_word(rng));
  return t;
}

namespace {

void apply_field_mutation(std::uint32_t& word, Rng& rng) {
  switch (rng.next_index(5)) {
    case 0: {  // opcode
      const auto v = static_cast<std::uint32_t>(rng.next_index(kNumOpcodeValues));
      word = (word & ~(0x3Fu << 26)) | v << 26;
      break;
    }
    case 1: {  // rd
      const auto v = static_cast<std::uint32_t>(rng.next_index(16));
      word = (word & ~(0xFu << 22)) | v << 22;
      break;
    }
    case 2: {  // rs1
      const auto v = static_cast<std::uint32_t>(rng.next_index(16));
      word = (word & ~(0xFu << 18)) | v << 18;
      break;
    }
    case 3: {  // rs2
      const auto v = static_cast<std::uint32_t>(rng.next_index(16));
      word = (word & ~(0xFu << 14)) | v << 14;
      break;
    }
    default: {  // imm
      const auto v = static_cast<std::uint32_t>(rng.next_index(1u << kImmBits));
      word = (word & ~0x3FFFu) | v;
      break;
    }
  }
}

}  // namespace

std::vector<Test> mutate(const Test& parent, Rng& rng, TestIdAllocator& ids,
                         const MutationConfig& config) {
  if (parent.words.empty()) throw std::invalid_argument("cannot mutate an empty test");
  validate(config);
  std::vector<Test> out;
  out.reserve(config.mutants_per_interesting);
  for (int m = 0; m < config.mutants_per_interesting; ++m) {
    Test child;
    child.id = ids.alloc();
    child.arm_id = parent.arm_id;
    child.parent_id = parent.id;
    child.words = parent.words;
    const std::size_t w = rng.next_index(child.words.size());
    switch (static_cast<MutationOp>(pick_weighted(rng, config.operator_weights))) {
      case MutationOp::BitFlip:
        child.words[w] ^= 1u << rng.next_index(32);
        break;
      case MutationOp::ByteFlip:
        child.words[w] ^= 0xFFu << (8 * rng.next_index(4));
        break;
      case MutationOp::ReplaceWord:
        child.words[w] = random_word(rng);
        break;
      case MutationOp::FieldMutate:
        apply_field_mutation(child.words[w], rng);
        break;
    }
    out.push_back(std::move(child));
  }
  return out;
}

std::optional<Test> TestPool::pop() {
  if (queue_.empty()) return std::nullopt;
  Test t = std::move(queue_.front());
  queue_.pop_front();
  return t;
}

void write_test_file(const std::filesystem::path& path, const Test& test) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::uint32_t w : test.words) {
    const unsigned char bytes[4] = {
        static_cast<unsigned char>(w & 0xFF),
        static_cast<unsigned char>((w >> 8) & 0xFF),
        static_cast<unsigned char>((w >> 16) & 0xFF),
        static_cast<unsigned char>((w >> 24) & 0xFF),
    };
    out.write(reinterpret_cast<const char*>(bytes), 4);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Test read_test_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Test t;
  unsigned char bytes[4];
  while (in.read(reinterpret_cast<char*>(bytes), 4)) {
    t.words.push_back(static_cast<std::uint32_t>(bytes[0]) |
                      static_cast<std::uint32_t>(bytes[1]) << 8 |
                      static_cast<std::uint32_t>(bytes[2]) << 16 |
                      static_cast<std::uint32_t>(bytes[3]) << 24);
  }
  if (in.gcount() != 0) throw std::runtime_error("truncated test file: " + path.string());
  return t;
}

}  // namespace banditfuzz
