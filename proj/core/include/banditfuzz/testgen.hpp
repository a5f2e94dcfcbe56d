#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "banditfuzz/rng.hpp"

namespace banditfuzz {

inline constexpr int kDefaultTestLength = 20;
inline constexpr int kDefaultMaxTestLength = 20;
// Fraction of generated words that are well-formed encodings of a legal
// opcode; the remainder are uniformly random 32-bit words so illegal paths
// still get exercised.
inline constexpr double kValidWordBias = 0.9;

// One schedulable input: a bounded sequence of encoded instructions plus
// lineage metadata.
struct Test {
  std::uint64_t id = 0;
  int arm_id = 0;
  std::optional<std::uint64_t> parent_id;
  std::vector<std::uint32_t> words;

  bool operator==(const Test&) const = default;
};

class TestIdAllocator {
 public:
  std::uint64_t alloc() { return next_++; }

 private:
  std::uint64_t next_ = 0;
};

enum class MutationOp : int {
  BitFlip = 0,      // flip one bit at a random position
  ByteFlip,         // invert one byte of one word
  ReplaceWord,      // replace one word with a freshly generated one
  FieldMutate,      // randomize one encoding field of one word
};
inline constexpr int kNumMutationOps = 4;

struct MutationConfig {
  int mutants_per_interesting = 5;
  std::array<double, kNumMutationOps> operator_weights = {0.25, 0.25, 0.25, 0.25};
};

void validate(const MutationConfig& config);

// Weighted draw over a probability vector; consumes one uniform variate.
int pick_weighted(Rng& rng, std::span<const double> weights);

// One instruction word: valid encoding with probability kValidWordBias, raw
// 32-bit noise otherwise.
std::uint32_t random_word(Rng& rng);

Test gen_seed(Rng& rng, TestIdAllocator& ids, int arm_id, int length);

// Produces exactly config.mutants_per_interesting children of the parent,
// each via one operator drawn from operator_weights. Length is preserved.
std::vector<Test> mutate(const Test& parent, Rng& rng, TestIdAllocator& ids,
                         const MutationConfig& config);

// Strict FIFO queue of tests belonging to one arm. Popping an empty pool is
// a signal (nullopt), not an error.
class TestPool {
 public:
  void push(Test test) { queue_.push_back(std::move(test)); }
  std::optional<Test> pop();
  std::size_t size() const { return queue_.size(); }
  bool empty() const { return queue_.empty(); }
  void clear() { queue_.clear(); }

 private:
  std::deque<Test> queue_;
};

// Flat binary reproducer format: the test's words as little-endian 32-bit
// values, nothing else.
void write_test_file(const std::filesystem::path& path, const Test& test);
Test read_test_file(const std::filesystem::path& path);

}  // namespace banditfuzz
