#pragma once

#include <cstdint>
#include <vector>

namespace banditfuzz {

// Fixed-universe set of coverage point ids in [0, universe_size).
class CoverageSet {
 public:
  CoverageSet() = default;
  explicit CoverageSet(int universe_size);

  int universe_size() const { return universe_; }
  int count() const { return count_; }
  bool empty() const { return count_ == 0; }

  bool contains(int point) const;
  // Returns true if the point was not present before.
  bool insert(int point);
  void merge(const CoverageSet& other);
  // Set difference: points in *this but not in other.
  CoverageSet minus(const CoverageSet& other) const;
  bool subset_of(const CoverageSet& other) const;
  void clear();

  std::vector<int> points() const;

  bool operator==(const CoverageSet&) const = default;

 private:
  void check_point(int point) const;
  void check_same_universe(const CoverageSet& other) const;

  int universe_ = 0;
  int count_ = 0;
  std::vector<std::uint64_t> bits_;
};

// Per-campaign coverage bookkeeping: one global set plus one set per arm.
// record_execution computes, for the executing arm, which of the covered
// points are new to that arm (local) and new to the whole campaign (global),
// then merges them in.
class CoverageLedger {
 public:
  CoverageLedger(int universe_size, int num_arms);

  struct Delta {
    CoverageSet new_local;
    CoverageSet new_global;
  };

  Delta record_execution(int arm, const CoverageSet& covered);
  // Forgets the arm's local history; global coverage is untouched.
  void clear_arm(int arm);

  int universe_size() const { return universe_; }
  int num_arms() const { return static_cast<int>(per_arm_.size()); }
  const CoverageSet& global_covered() const { return global_; }
  const CoverageSet& arm_covered(int arm) const;

 private:
  void check_arm(int arm) const;

  int universe_;
  CoverageSet global_;
  std::vector<CoverageSet> per_arm_;
};

struct RewardParams {
  double alpha = 0.25;
  // Alternative weighting that scores locally-new-but-globally-old points
  // against alpha and globally-new points against (1 - alpha) disjointly.
  bool disjoint = false;
};

// Weighted count of new coverage: alpha * |new_local| + (1 - alpha) * |new_global|.
// Requires new_global to be a subset of new_local.
double compute_reward(const CoverageSet& new_local, const CoverageSet& new_global,
                      const RewardParams& params);

// Flags an arm as depleted once it has gone gamma consecutive picks without
// any new local coverage.
class SaturationMonitor {
 public:
  SaturationMonitor(int gamma, int num_arms);

  // Call once per iteration for the selected arm. Returns true exactly when
  // the arm's zero streak reaches gamma; the streak is then cleared.
  bool observe(int arm, int new_local_count);
  void clear_arm(int arm);

  int gamma() const { return gamma_; }
  int streak(int arm) const;

 private:
  int gamma_;
  std::vector<int> zero_streak_;
};

}  // namespace banditfuzz
