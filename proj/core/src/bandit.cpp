#include "banditfuzz/bandit.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace banditfuzz {

namespace {

// EXP3 weights are kept in plain doubles. Selection only ever uses weight
// ratios, so once the largest weight passes this threshold all weights are
// divided by it; a floor keeps them strictly positive through the rescale.
constexpr double kWeightRescaleThreshold = 1e150;
constexpr double kWeightFloor = 1e-300;

void validate_algorithm(const AlgorithmKind& algorithm) {
  if (const auto* eg = std::get_if<EpsilonGreedy>(&algorithm)) {
    if (!(eg->epsilon >= 0.0 && eg->epsilon <= 1.0))
      throw std::invalid_argument("epsilon must be in [0,1]");
  } else if (const auto* e3 = std::get_if<Exp3>(&algorithm)) {
    if (!(e3->eta > 0.0 && e3->eta <= 1.0))
      throw std::invalid_argument("eta must be in (0,1]");
  }
}

}  // namespace

BanditState::BanditState(AlgorithmKind algorithm, int num_arms, int total_points,
                         std::uint64_t rng_seed)
    : algorithm_(algorithm), total_points_(total_points), rng_(rng_seed) {
  validate_algorithm(algorithm_);
  if (num_arms < 1) throw std::invalid_argument("num_arms must be at least 1");
  if (total_points < 1) throw std::invalid_argument("total_points must be at least 1");
  arms_.resize(num_arms);
  const bool exp3 = std::holds_alternative<Exp3>(algorithm_);
  for (int i = 0; i < num_arms; ++i) {
    arms_[i].arm_id = i;
    if (exp3) {
      const double eta = std::get<Exp3>(algorithm_).eta;
      // Uniform weights make the mixing rule collapse to 1/|A|.
      arms_[i].last_prob = (1.0 - eta) / num_arms + eta / num_arms;
    }
  }
}

void BanditState::check_arm(int arm) const {
  if (arm < 0 || arm >= num_arms())
    throw std::invalid_argument("arm id " + std::to_string(arm) + " out of range");
}

int BanditState::pick_among(const std::vector<int>& candidates) {
  if (candidates.size() == 1) return candidates.front();
  return candidates[rng_.next_index(candidates.size())];
}

int BanditState::argmax_q() {
  double best = arms_[0].q_value;
  for (const ArmStats& a : arms_)
    if (a.q_value > best) best = a.q_value;
  std::vector<int> candidates;
  for (const ArmStats& a : arms_)
    if (a.q_value == best) candidates.push_back(a.arm_id);
  return pick_among(candidates);
}

int BanditState::select_ucb() {
  std::vector<int> unpulled;
  for (const ArmStats& a : arms_)
    if (a.pull_count == 0) unpulled.push_back(a.arm_id);
  if (!unpulled.empty()) return pick_among(unpulled);

  const double log_t = std::log(static_cast<double>(time_step_));
  double best = -1.0;
  std::vector<double> index(arms_.size());
  for (const ArmStats& a : arms_) {
    index[a.arm_id] = a.q_value + std::sqrt(2.0 * log_t / static_cast<double>(a.pull_count));
    if (a.arm_id == 0 || index[a.arm_id] > best) best = index[a.arm_id];
  }
  std::vector<int> candidates;
  for (int i = 0; i < num_arms(); ++i)
    if (index[i] == best) candidates.push_back(i);
  return pick_among(candidates);
}

int BanditState::select_exp3(double eta) {
  double total = 0.0;
  for (const ArmStats& a : arms_) total += a.weight;
  const int n = num_arms();
  for (ArmStats& a : arms_) a.last_prob = (1.0 - eta) * a.weight / total + eta / n;

  const double u = rng_.next_double();
  double cum = 0.0;
  for (const ArmStats& a : arms_) {
    cum += a.last_prob;
    if (u < cum) return a.arm_id;
  }
  return n - 1;
}

int BanditState::select_arm() {
  ++time_step_;
  if (const auto* eg = std::get_if<EpsilonGreedy>(&algorithm_)) {
    const double u = rng_.next_double();
    if (u < eg->epsilon) return static_cast<int>(rng_.next_index(arms_.size()));
    return argmax_q();
  }
  if (std::holds_alternative<Ucb>(algorithm_)) return select_ucb();
  return select_exp3(std::get<Exp3>(algorithm_).eta);
}

void BanditState::update(int arm, double raw_reward) {
  check_arm(arm);
  if (!(raw_reward >= 0.0)) throw std::invalid_argument("raw_reward must be nonnegative");
  ArmStats& a = arms_[arm];
  if (std::holds_alternative<Exp3>(algorithm_)) {
    const double eta = std::get<Exp3>(algorithm_).eta;
    const double normalized = raw_reward / static_cast<double>(total_points_);
    const double x = normalized / a.last_prob;
    a.weight *= std::exp(eta * x / static_cast<double>(num_arms()));
    rescale_weights_if_needed();
  }
  // Incremental mean; for EXP3 this is bookkeeping only and never feeds
  // selection.
  ++a.pull_count;
  a.q_value += (raw_reward - a.q_value) / static_cast<double>(a.pull_count);
}

void BanditState::reset_arm(int arm) {
  check_arm(arm);
  ArmStats& a = arms_[arm];
  if (std::holds_alternative<Exp3>(algorithm_)) {
    if (num_arms() == 1) {
      a.weight = 1.0;
    } else {
      double sum = 0.0;
      for (const ArmStats& other : arms_)
        if (other.arm_id != arm) sum += other.weight;
      a.weight = sum / static_cast<double>(num_arms() - 1);
    }
  }
  a.q_value = 0.0;
  a.pull_count = 0;
}

void BanditState::rescale_weights_if_needed() {
  double max_w = 0.0;
  for (const ArmStats& a : arms_)
    if (a.weight > max_w) max_w = a.weight;
  if (max_w <= kWeightRescaleThreshold) return;
  for (ArmStats& a : arms_) {
    a.weight /= max_w;
    if (a.weight < kWeightFloor) a.weight = kWeightFloor;
  }
}

}  // namespace banditfuzz
