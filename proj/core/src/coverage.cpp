#include "banditfuzz/coverage.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace banditfuzz {

namespace {
constexpr int kWordBits = 64;
}

CoverageSet::CoverageSet(int universe_size) : universe_(universe_size) {
  if (universe_size < 1) throw std::invalid_argument("coverage universe size must be positive");
  bits_.assign((universe_size + kWordBits - 1) / kWordBits, 0);
}

void CoverageSet::check_point(int point) const {
  if (point < 0 || point >= universe_)
    throw std::invalid_argument("coverage point " + std::to_string(point) +
                                " outside universe of size " + std::to_string(universe_));
}

void CoverageSet::check_same_universe(const CoverageSet& other) const {
  if (universe_ != other.universe_)
    throw std::invalid_argument("coverage universe mismatch: " + std::to_string(universe_) +
                                " vs " + std::to_string(other.universe_));
}

bool CoverageSet::contains(int point) const {
  check_point(point);
  return (bits_[point / kWordBits] >> (point % kWordBits)) & 1;
}

bool CoverageSet::insert(int point) {
  check_point(point);
  std::uint64_t& w = bits_[point / kWordBits];
  const std::uint64_t mask = 1ull << (point % kWordBits);
  if (w & mask) return false;
  w |= mask;
  ++count_;
  return true;
}

void CoverageSet::merge(const CoverageSet& other) {
  check_same_universe(other);
  count_ = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    bits_[i] |= other.bits_[i];
    count_ += std::popcount(bits_[i]);
  }
}

CoverageSet CoverageSet::minus(const CoverageSet& other) const {
  check_same_universe(other);
  CoverageSet out(universe_);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    out.bits_[i] = bits_[i] & ~other.bits_[i];
    out.count_ += std::popcount(out.bits_[i]);
  }
  return out;
}

bool CoverageSet::subset_of(const CoverageSet& other) const {
  check_same_universe(other);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] & ~other.bits_[i]) return false;
  return true;
}

void CoverageSet::clear() {
  bits_.assign(bits_.size(), 0);
  count_ = 0;
}

std::vector<int> CoverageSet::points() const {
  std::vector<int> out;
  out.reserve(count_);
  for (int p = 0; p < universe_; ++p)
    if ((bits_[p / kWordBits] >> (p % kWordBits)) & 1) out.push_back(p);
  return out;
}

CoverageLedger::CoverageLedger(int universe_size, int num_arms)
    : universe_(universe_size), global_(universe_size) {
  if (num_arms < 1) throw std::invalid_argument("ledger needs at least one arm");
  per_arm_.assign(num_arms, CoverageSet(universe_size));
}

void CoverageLedger::check_arm(int arm) const {
  if (arm < 0 || arm >= num_arms())
    throw std::invalid_argument("arm id " + std::to_string(arm) + " out of range");
}

CoverageLedger::Delta CoverageLedger::record_execution(int arm, const CoverageSet& covered) {
  check_arm(arm);
  if (covered.universe_size() != universe_)
    throw std::invalid_argument("covered set universe mismatch");
  Delta d;
  d.new_local = covered.minus(per_arm_[arm]);
  d.new_global = d.new_local.minus(global_);
  per_arm_[arm].merge(d.new_local);
  global_.merge(d.new_global);
  return d;
}

void CoverageLedger::clear_arm(int arm) {
  check_arm(arm);
  per_arm_[arm].clear();
}

const CoverageSet& CoverageLedger::arm_covered(int arm) const {
  check_arm(arm);
  return per_arm_[arm];
}

double compute_reward(const CoverageSet& new_local, const CoverageSet& new_global,
                      const RewardParams& params) {
  if (!(params.alpha >= 0.0 && params.alpha <= 1.0))
    throw std::invalid_argument("alpha must be in [0,1]");
  if (!new_global.subset_of(new_local))
    throw std::invalid_argument("new_global must be a subset of new_local");
  const double local = static_cast<double>(new_local.count());
  const double global = static_cast<double>(new_global.count());
  if (params.disjoint) return params.alpha * (local - global) + (1.0 - params.alpha) * global;
  return params.alpha * local + (1.0 - params.alpha) * global;
}

SaturationMonitor::SaturationMonitor(int gamma, int num_arms) : gamma_(gamma) {
  if (gamma < 1) throw std::invalid_argument("gamma must be positive");
  if (num_arms < 1) throw std::invalid_argument("monitor needs at least one arm");
  zero_streak_.assign(num_arms, 0);
}

bool SaturationMonitor::observe(int arm, int new_local_count) {
  int& streak = zero_streak_.at(arm);
  if (new_local_count > 0) {
    streak = 0;
    return false;
  }
  if (++streak >= gamma_) {
    streak = 0;
    return true;
  }
  return false;
}

void SaturationMonitor::clear_arm(int arm) { zero_streak_.at(arm) = 0; }

int SaturationMonitor::streak(int arm) const { return zero_streak_.at(arm); }

}  // namespace banditfuzz
